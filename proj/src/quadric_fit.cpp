// SPDX-License-Identifier: Apache-2.0
#include "aqfc/quadric_fit.hpp"

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include "aqfc/errors.hpp"

namespace aqfc {

using Mat10 = Eigen::Matrix<double, 10, 10>;
using Vec10 = Eigen::Matrix<double, 10, 1>;

FitWeights compute_weights(std::span<const VertexNormal> samples) {
  FitWeights w;
  w.position.reserve(samples.size());
  w.normal.reserve(samples.size());
  if (samples.empty()) return w;
  const Vec3& center = samples.front().position;
  const Vec3 n = samples.front().normal.normalized();
  for (const auto& s : samples) {
    const double d2 = (center - s.position).squaredNorm();
    const double dn2 = (n - s.normal.normalized()).squaredNorm();
    w.position.push_back(std::exp(-d2 * d2));
    w.normal.push_back(1e-4 * std::exp(-dn2));
  }
  return w;
}

NormalEquations assemble_normal_equations(std::span<const VertexNormal> samples, const FitWeights& weights) {
  NormalEquations sys;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec3& p = samples[i].position;
    const Vec10 b = monomials(p);
    const Eigen::Matrix<double, 3, 10> J = monomial_gradients(p);
    sys.matrix.noalias() += weights.position[i] * (b * b.transpose());
    sys.matrix.noalias() += weights.normal[i] * (J.transpose() * J);
    sys.rhs.noalias() += weights.normal[i] * (J.transpose() * samples[i].normal);
  }
  return sys;
}

double fit_objective(std::span<const VertexNormal> samples, const FitWeights& weights, const Quadricd& q) {
  double f = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = evaluate(q, samples[i].position);
    f += weights.position[i] * r * r +
         weights.normal[i] * (samples[i].normal - gradient(q, samples[i].position)).squaredNorm();
  }
  return f;
}

namespace {

// Reciprocal condition estimate below which a Cholesky factor is not trusted.
constexpr double kMinRcond = 1e-13;

// Jacobi-equilibrated Cholesky solve with one refinement step.
std::optional<Vec10> spd_solve(const Mat10& A, const Vec10& b) {
  Vec10 d;
  for (int i = 0; i < 10; ++i) d[i] = A(i, i) > 0.0 ? 1.0 / std::sqrt(A(i, i)) : 1.0;
  const Mat10 S = d.asDiagonal() * A * d.asDiagonal();
  Eigen::LLT<Mat10> llt(S);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const double rc = llt.rcond();
  if (!(rc > kMinRcond)) return std::nullopt;
  Vec10 x = d.asDiagonal() * llt.solve(d.asDiagonal() * b);
  const Vec10 r = b - A * x;
  x += d.asDiagonal() * llt.solve(d.asDiagonal() * r);
  if (!x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace

SolvedQuadric solve_quadric(const NormalEquations& system) {
  SolvedQuadric out;
  auto x = spd_solve(system.matrix, system.rhs);
  if (!x) {
    const double base = 1e-9 * system.matrix.trace() / 10.0;
    double lambda = base;
    for (int k = 0; k <= 8 && !x && base > 0.0; ++k, lambda *= 2.0) {
      Mat10 A = system.matrix;
      A.diagonal().array() += lambda;
      x = spd_solve(A, system.rhs);
      if (x) out.lambda = lambda;
    }
    if (!x) throw FitError("normal equations are singular even after Tikhonov regularization");
    out.regularized = true;
  }
  out.quadric = Quadricd(*x);
  out.degenerate_to_plane = degenerate_to_plane(out.quadric);
  return out;
}

LocalFit fit_quadric(const Neighborhood& nb) {
  LocalFit fit;
  fit.origin = nb.center().position;
  std::vector<VertexNormal> local(nb.samples);
  for (auto& s : local) s.position -= fit.origin;
  const FitWeights w = compute_weights(local);
  fit.solved = solve_quadric(assemble_normal_equations(local, w));
  return fit;
}

double projection_angle(const Quadricd& q, const Vec3& p, const Vec3& w) {
  const Vec3 d = p - w;
  const Vec3 g = gradient(q, w);
  const double denom = d.norm() * g.norm();
  if (denom == 0.0) return 0.0;
  return std::asin(std::min(1.0, d.cross(g).norm() / denom));
}

namespace {

using Vec4 = Eigen::Vector4d;

Vec4 lagrange_residual(const Quadricd& q, const Vec3& p, const Vec3& w, double lambda) {
  Vec4 F;
  F.head<3>() = w - p + lambda * gradient(q, w);
  F[3] = evaluate(q, w);
  return F;
}

}  // namespace

Projection project_point(const Quadricd& q, const Vec3& p, const ProjectionOptions& options) {
  const Vec3 g0 = gradient(q, p);
  if (!(g0.norm() > 1e-12)) {
    throw ProjectionError("gradient vanishes at the point to be projected");
  }
  const double qp = evaluate(q, p);
  const double eps_q = 1e-10 * (1.0 + std::abs(qp));
  if (std::abs(qp) <= eps_q) return {p, false, 0};

  const auto converged = [&](const Vec3& w) {
    return std::abs(evaluate(q, w)) <= eps_q &&
           ((p - w).norm() <= eps_q || projection_angle(q, p, w) < options.angle_tolerance);
  };

  double lambda = qp / g0.squaredNorm();
  Vec3 w = p - lambda * g0;
  const Mat3 H = hessian(q);
  Vec4 F = lagrange_residual(q, p, w, lambda);

  for (int it = 0; it < options.max_iterations; ++it) {
    if (converged(w)) return {w, false, it};
    const Vec3 g = gradient(q, w);
    Eigen::Matrix4d J;
    J.topLeftCorner<3, 3>() = Mat3::Identity() + lambda * H;
    J.topRightCorner<3, 1>() = g;
    J.bottomLeftCorner<1, 3>() = g.transpose();
    J(3, 3) = 0.0;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
    if (!lu.isInvertible()) break;
    const Vec4 step = lu.solve(-F);

    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const Vec3 wt = w + t * step.head<3>();
      const double lt = lambda + t * step[3];
      const Vec4 Ft = lagrange_residual(q, p, wt, lt);
      if (Ft.norm() < F.norm()) {
        w = wt;
        lambda = lt;
        F = Ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (converged(w)) return {w, false, options.max_iterations};

  // First-order foot-point iteration from the original point.
  Vec3 v = p;
  for (int it = 0; it < options.fallback_iterations; ++it) {
    const Vec3 g = gradient(q, v);
    const double gg = g.squaredNorm();
    if (!(gg > 1e-24)) throw ProjectionError("gradient vanishes along the projection path");
    v -= (evaluate(q, v) / gg) * g;
  }
  return {v, true, options.fallback_iterations};
}

}  // namespace aqfc
