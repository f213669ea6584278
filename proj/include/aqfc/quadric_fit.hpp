// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "aqfc/mesh.hpp"
#include "aqfc/quadric.hpp"

namespace aqfc {

/// Per-sample weights, aligned with Neighborhood::samples.
struct FitWeights {
  std::vector<double> position;
  std::vector<double> normal;
};

/// Distance/normal-deviation weights relative to the first sample:
///   w_pos = exp(-|V - Vi|^4),  w_nrm = 1e-4 * exp(-|n/|n| - ni/|ni||^2).
FitWeights compute_weights(std::span<const VertexNormal> samples);
inline FitWeights compute_weights(const Neighborhood& nb) { return compute_weights(nb.samples); }

/// Stationarity system  matrix * a = rhs  of the weighted objective
///   f(a) = sum  w_pos q(Vi)^2 + w_nrm |ni - grad q(Vi)|^2.
struct NormalEquations {
  Eigen::Matrix<double, 10, 10> matrix = Eigen::Matrix<double, 10, 10>::Zero();
  Eigen::Matrix<double, 10, 1> rhs = Eigen::Matrix<double, 10, 1>::Zero();
};

NormalEquations assemble_normal_equations(std::span<const VertexNormal> samples, const FitWeights& weights);
inline NormalEquations assemble_normal_equations(const Neighborhood& nb, const FitWeights& weights) {
  return assemble_normal_equations(nb.samples, weights);
}

/// Direct evaluation of the fitting objective (no normal equations involved).
double fit_objective(std::span<const VertexNormal> samples, const FitWeights& weights, const Quadricd& q);

struct SolvedQuadric {
  Quadricd quadric;
  bool regularized = false;
  bool degenerate_to_plane = false;
  double lambda = 0.0;  // Tikhonov term actually used
};

/// Minimizer of the objective. Falls back to a doubling Tikhonov ladder when
/// the matrix is not numerically positive definite; throws FitError if every
/// rung fails.
SolvedQuadric solve_quadric(const NormalEquations& system);

/// Fit in a frame centred on the neighbourhood centre. `world()` transports
/// the coefficients back to mesh coordinates.
struct LocalFit {
  SolvedQuadric solved;
  Vec3 origin = Vec3::Zero();
  Quadricd world() const { return shifted(solved.quadric, origin); }
};

LocalFit fit_quadric(const Neighborhood& nb);

struct ProjectionOptions {
  int max_iterations = 50;
  int max_halvings = 20;
  double angle_tolerance = 1e-8;  // radians
  int fallback_iterations = 100;
};

struct Projection {
  Vec3 point;
  bool first_order = false;  // Newton did not converge; first-order iterate returned
  int iterations = 0;
};

/// Closest point of the zero set to `p`, via damped Newton on the Lagrange
/// system {q(W) = 0, p - W = lambda grad q(W)}. Throws ProjectionError when
/// the gradient vanishes.
Projection project_point(const Quadricd& q, const Vec3& p, const ProjectionOptions& options = {});

/// Angle between (p - w) and grad q(w), folded to [0, pi/2].
double projection_angle(const Quadricd& q, const Vec3& p, const Vec3& w);

}  // namespace aqfc
