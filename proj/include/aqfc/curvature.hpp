// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aqfc/errors.hpp"
#include "aqfc/mesh.hpp"
#include "aqfc/quadric.hpp"
#include "aqfc/quadric_fit.hpp"

namespace aqfc {

// ---------------------------------------------------------------------------
// Curvature of an implicit surface g = 0 from its gradient and Hessian.
// Sign convention: a sphere with outward gradient has H = -1/r, K = 1/r^2.
// ---------------------------------------------------------------------------

/// Classical adjugate (transpose of the cofactor matrix).
template <typename Derived>
Matrix3<typename Derived::Scalar> adjugate(const Eigen::MatrixBase<Derived>& m) {
  Matrix3<typename Derived::Scalar> a;
  a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return a;
}

template <typename DerivedG, typename DerivedH>
typename DerivedG::Scalar implicit_gaussian(const Eigen::MatrixBase<DerivedG>& grad,
                                            const Eigen::MatrixBase<DerivedH>& hess) {
  using S = typename DerivedG::Scalar;
  const S n2 = grad.squaredNorm();
  if (!(std::sqrt(n2) > S(1e-12))) throw SingularPointError("vanishing gradient in Gaussian curvature");
  return grad.dot(adjugate(hess) * grad) / (n2 * n2);
}

template <typename DerivedG, typename DerivedH>
typename DerivedG::Scalar implicit_mean(const Eigen::MatrixBase<DerivedG>& grad,
                                        const Eigen::MatrixBase<DerivedH>& hess) {
  using S = typename DerivedG::Scalar;
  const S n2 = grad.squaredNorm();
  const S n = std::sqrt(n2);
  if (!(n > S(1e-12))) throw SingularPointError("vanishing gradient in mean curvature");
  return (grad.dot(hess * grad) - n2 * hess.trace()) / (S(2) * n2 * n);
}

/// Quadric gradient at `foot`, rescaled to the length of `normal`.
Vec3 corrected_gradient(const Vec3& normal, const Quadricd& q, const Vec3& foot);

/// (H + sqrt(d), H - sqrt(d)) with d = max(H^2 - K, 0).
std::pair<double, double> principal_curvatures(double H, double K);

/// sqrt(max(2H^2 - K, 0)).
double curvedness(double H, double K);

/// -(2/pi) atan2(k1 + k2, k1 - k2); empty at planar points (curvedness < 1e-12).
std::optional<double> shape_index(double H, double K);

// ---------------------------------------------------------------------------
// Per-vertex results
// ---------------------------------------------------------------------------

enum CurvatureFlag : std::uint8_t {
  kRegularized = 1u << 0,
  kFirstOrderProjection = 1u << 1,
  kDegenerateToPlane = 1u << 2,
  kFitFailed = 1u << 3,
  kBoundaryVertex = 1u << 4,
};

/// Comma-separated flag names, "-" when no flag is set.
std::string flag_names(std::uint8_t flags);

struct CurvatureResult {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  double mean = kNaN;
  double gaussian = kNaN;
  double kappa1 = kNaN;
  double kappa2 = kNaN;
  double curvedness = kNaN;
  double shape_index = kNaN;  // NaN at planar points
  std::uint8_t flags = 0;

  bool has(CurvatureFlag f) const { return (flags & f) != 0; }
  bool failed() const { return has(kFitFailed); }

  /// Fills the derived quantities from H and K.
  static CurvatureResult from_mean_gaussian(double H, double K, std::uint8_t flags = 0);
  static CurvatureResult failure(std::uint8_t flags = 0) { return {.flags = std::uint8_t(flags | kFitFailed)}; }
};

struct AqfcParams {
  std::size_t m = kDefaultNeighborhoodSize;
  ProjectionOptions projection;
};

/// Everything the estimator produced for one vertex.
struct AqfcDetail {
  CurvatureResult result;
  std::optional<Quadricd> world_quadric;  // absent when the fit failed
  std::optional<Vec3> foot;
};

AqfcDetail aqfc_estimate_detailed(const Mesh& mesh, std::span<const Vec3> normals, std::size_t vertex,
                                  const AqfcParams& params = {});

/// Algebraic quadric fitting estimate at one vertex. Per-vertex failures are
/// reported through the kFitFailed flag, never thrown.
inline CurvatureResult aqfc_estimate(const Mesh& mesh, std::span<const Vec3> normals, std::size_t vertex,
                                     const AqfcParams& params = {}) {
  return aqfc_estimate_detailed(mesh, normals, vertex, params).result;
}

/// Discrete-operator baseline: angle deficit over mixed area for K, norm of
/// the cotangent Laplacian for H, signed against the averaged vertex normal
/// so that outward-convex regions come out negative like the implicit
/// formulas. Polygons are fan-triangulated from their lowest-index corner.
CurvatureResult ddgo_estimate(const Mesh& mesh, std::size_t vertex);

/// Mixed (Voronoi / obtuse-split) area of a vertex over the fan-triangulated mesh.
double mixed_area(const Mesh& mesh, std::size_t vertex);

/// Sum of interior angles at `vertex` over the fan-triangulated mesh.
double angle_sum(const Mesh& mesh, std::size_t vertex);

enum class Method { kAqfc, kDdgo };

/// Runs the selected estimator over every vertex. Work is split into
/// contiguous index blocks across `threads` workers; the output is indexed
/// by vertex so it does not depend on the schedule.
std::vector<CurvatureResult> estimate_all(const Mesh& mesh, std::span<const Vec3> normals, Method method,
                                          const AqfcParams& params = {}, unsigned threads = 1);

/// Same as estimate_all for AQFC, but also returns the fitted world-frame
/// quadrics (for debug dumps).
std::vector<AqfcDetail> aqfc_estimate_all_detailed(const Mesh& mesh, std::span<const Vec3> normals,
                                                   const AqfcParams& params = {}, unsigned threads = 1);

}  // namespace aqfc
