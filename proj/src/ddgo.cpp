// SPDX-License-Identifier: Apache-2.0
//
// Discrete-operator curvature baseline (angle deficit / cotangent Laplacian
// over mixed Voronoi areas).
#include <algorithm>
#include <array>
#include <numbers>

#include <Eigen/Geometry>

#include "aqfc/curvature.hpp"

namespace aqfc {

namespace {

struct LocalOperators {
  double angle_sum = 0.0;
  double area = 0.0;
  Vec3 laplacian = Vec3::Zero();  // sum (cot a + cot b) (v - vj)
  Vec3 normal_sum = Vec3::Zero();
};

// Calls fn(a, b) for every fan triangle (vertex, a, b) incident to `vertex`,
// with (vertex, a, b) in the face's winding order.
template <typename Fn>
void for_each_fan_corner(const Mesh& mesh, std::size_t vertex, Fn&& fn) {
  for (std::size_t f : mesh.vertex_faces(vertex)) {
    const auto c = mesh.face(f);
    const std::size_t k = c.size();
    const std::size_t start =
        static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
    for (std::size_t i = 1; i + 1 < k; ++i) {
      const std::array<std::size_t, 3> tri{c[start], c[(start + i) % k], c[(start + i + 1) % k]};
      for (int j = 0; j < 3; ++j) {
        if (tri[j] == vertex) fn(tri[(j + 1) % 3], tri[(j + 2) % 3]);
      }
    }
  }
}

LocalOperators local_operators(const Mesh& mesh, std::size_t vertex) {
  LocalOperators op;
  const Vec3& p = mesh.vertex(vertex);
  for_each_fan_corner(mesh, vertex, [&](std::size_t ia, std::size_t ib) {
    const Vec3& a = mesh.vertex(ia);
    const Vec3& b = mesh.vertex(ib);
    const Vec3 e1 = a - p, e2 = b - p;
    const Vec3 cr = e1.cross(e2);
    const double twice_area = cr.norm();
    if (!(twice_area > 0.0)) return;
    const double area = 0.5 * twice_area;

    const double cos_p = e1.dot(e2);
    const double cos_a = (p - a).dot(b - a);
    const double cos_b = (p - b).dot(a - b);
    const double cot_a = cos_a / twice_area;  // |(p-a) x (b-a)| = twice_area
    const double cot_b = cos_b / twice_area;

    op.angle_sum += std::atan2(twice_area, cos_p);
    op.laplacian += cot_a * (p - b) + cot_b * (p - a);
    op.normal_sum += cr / twice_area;

    if (cos_p < 0.0) {
      op.area += area / 2.0;
    } else if (cos_a < 0.0 || cos_b < 0.0) {
      op.area += area / 4.0;
    } else {
      op.area += (e2.squaredNorm() * cot_a + e1.squaredNorm() * cot_b) / 8.0;
    }
  });
  return op;
}

}  // namespace

double mixed_area(const Mesh& mesh, std::size_t vertex) { return local_operators(mesh, vertex).area; }

double angle_sum(const Mesh& mesh, std::size_t vertex) { return local_operators(mesh, vertex).angle_sum; }

CurvatureResult ddgo_estimate(const Mesh& mesh, std::size_t vertex) {
  const bool boundary = mesh.is_boundary(vertex);
  const std::uint8_t flags = boundary ? kBoundaryVertex : 0;
  const LocalOperators op = local_operators(mesh, vertex);
  if (!(op.area > 0.0)) return CurvatureResult::failure(flags);

  const double total = boundary ? std::numbers::pi : 2.0 * std::numbers::pi;
  const double K = (total - op.angle_sum) / op.area;
  const Vec3 mean_normal = op.laplacian / (2.0 * op.area);
  double H = 0.5 * mean_normal.norm();
  // Outward-convex regions push the vertex along its normal; report them
  // negative like the implicit-surface formulas.
  if (mean_normal.dot(op.normal_sum) > 0.0) H = -H;
  return CurvatureResult::from_mean_gaussian(H, K, flags);
}

}  // namespace aqfc
