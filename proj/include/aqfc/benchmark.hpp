// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aqfc/curvature.hpp"
#include "aqfc/mesh.hpp"

namespace aqfc {

// Torus with major radius 3 and minor radius 1:
//   s(theta, phi) = ((3 + cos theta) cos phi, (3 + cos theta) sin phi, sin theta).
// Curvatures are given for the outward normal under the implicit-surface sign
// convention, so H ranges over [-0.65, -0.25] and K over [-0.5, 0.25].
Vec3 torus_point(double theta, double phi);
Vec3 torus_normal(double theta, double phi);
double torus_mean_curvature(double theta);
double torus_gaussian_curvature(double theta);

/// Analytic curvature per vertex plus the parameter pair it was sampled at.
struct GroundTruth {
  std::vector<double> mean;
  std::vector<double> gaussian;
  std::vector<double> theta;
  std::vector<double> phi;

  std::size_t size() const { return mean.size(); }
};

struct SampledSurface {
  Mesh mesh;
  GroundTruth truth;
};

/// Uniform (theta, phi) grid, quad faces wrapping in both directions.
SampledSurface sample_torus_regular(std::size_t n_theta, std::size_t n_phi);

/// `count` distinct random parameter pairs, triangulated by the Delaunay
/// triangulation of the flat periodic parameter square.
SampledSurface sample_torus_irregular(std::size_t count, std::uint64_t seed);

/// Latitude/longitude unit sphere: n_theta meridians, n_phi latitude bands,
/// poles collapsed to single vertices, each quad split along a random diagonal.
/// Produces n_theta * (n_phi - 1) + 2 vertices.
SampledSurface sample_sphere_irregular(std::size_t n_theta = 30, std::size_t n_phi = 17,
                                       std::uint64_t seed = 1);

/// Exact unit-sphere vertex normals for a sphere sample (positions normalized).
std::vector<Vec3> sphere_normals(const Mesh& mesh);

struct ErrorReport {
  double h_min = 0.0, h_max = 0.0, h_avg = 0.0;
  double k_min = 0.0, k_max = 0.0, k_avg = 0.0;
  std::size_t n_failed = 0;
};

/// Extrema of the raw estimates and mean absolute deviation from the truth,
/// over vertices whose estimate did not fail. Throws std::invalid_argument
/// on a length mismatch and std::runtime_error when every vertex failed.
ErrorReport error_report(std::span<const CurvatureResult> estimates, const GroundTruth& truth);

/// Periodic Delaunay triangulation of integer points in [0, period)^2.
/// Triangles are counter-clockwise in (x, y). Exposed for testing.
std::vector<std::array<std::size_t, 3>> periodic_delaunay(std::span<const std::array<std::int64_t, 2>> points,
                                                          std::int64_t period);

}  // namespace aqfc
