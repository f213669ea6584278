// SPDX-License-Identifier: Apache-2.0
#include "invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "aqfc/benchmark.hpp"
#include "aqfc/curvature.hpp"
#include "aqfc/quadric_fit.hpp"

namespace aqfc::testing {

namespace {

using Mat4 = Eigen::Matrix4d;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

void note(SuiteResult& r, double violation, const std::string& what) {
  r.worst = std::max(r.worst, violation);
  if (!(violation <= 1.0)) {
    if (r.failures == 0) r.first_failure = what;
    ++r.failures;
  }
}

// q(x) = [x;1]^T A [x;1]
Mat4 to_matrix(const Quadricd& q) {
  const auto& a = q.coeffs;
  Mat4 m;
  m << a[0], a[3] / 2, a[4] / 2, a[6] / 2,  //
      a[3] / 2, a[1], a[5] / 2, a[7] / 2,   //
      a[4] / 2, a[5] / 2, a[2], a[8] / 2,   //
      a[6] / 2, a[7] / 2, a[8] / 2, a[9];
  return m;
}

Quadricd from_matrix(const Mat4& m) {
  Quadricd q;
  q.coeffs << m(0, 0), m(1, 1), m(2, 2), 2 * m(0, 1), 2 * m(0, 2), 2 * m(1, 2), 2 * m(0, 3), 2 * m(1, 3),
      2 * m(2, 3), m(3, 3);
  return q;
}

// r(Rx + t) = q(x)
Quadricd rigidly_moved(const Quadricd& q, const Mat3& R, const Vec3& t) {
  Mat4 inv = Mat4::Identity();
  inv.topLeftCorner<3, 3>() = R.transpose();
  inv.topRightCorner<3, 1>() = -R.transpose() * t;
  return from_matrix(inv.transpose() * to_matrix(q) * inv);
}

// A canonical surface with principal radii >= 0.5 near the returned point,
// rigidly moved to a random pose.
struct SurfaceSample {
  Quadricd q;
  Vec3 on_surface;
};

SurfaceSample random_surface(std::mt19937_64& rng) {
  const double a = uniform(rng, 1, 2), b = uniform(rng, 1, 2), c = uniform(rng, 1, 2);
  Quadricd q;
  Vec3 p;
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: {  // ellipsoid
      q.coeffs << 1 / (a * a), 1 / (b * b), 1 / (c * c), 0, 0, 0, 0, 0, 0, -1;
      const Vec3 u = random_unit(rng);
      p = Vec3(a * u.x(), b * u.y(), c * u.z());
      break;
    }
    case 1: {  // hyperboloid of one sheet
      q.coeffs << 1 / (a * a), 1 / (b * b), -1 / (c * c), 0, 0, 0, 0, 0, 0, -1;
      const double s = uniform(rng, -1, 1), t = uniform(rng, 0, 2 * std::numbers::pi);
      p = Vec3(a * std::cosh(s) * std::cos(t), b * std::cosh(s) * std::sin(t), c * std::sinh(s));
      break;
    }
    default: {  // elliptic or hyperbolic paraboloid z = x^2/a +- y^2/b
      const double sign = uniform(rng, -1, 1) < 0 ? -1.0 : 1.0;
      q.coeffs << 1 / a, sign / b, 0, 0, 0, 0, 0, 0, -1, 0;
      const double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1);
      p = Vec3(x, y, x * x / a + sign * y * y / b);
      break;
    }
  }
  const Mat3 R = random_rotation(rng);
  const Vec3 t(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
  q.coeffs *= uniform(rng, 0.2, 5.0);
  return {rigidly_moved(q, R, t), R * p + t};
}

struct MeshCase {
  Mesh mesh;
  std::string label;
};

MeshCase random_mesh(std::mt19937_64& rng, int index) {
  const std::uint64_t seed = rng();
  switch (index % 3) {
    case 0: return {sample_torus_irregular(200, seed).mesh, "irregular torus 200"};
    case 1: return {sample_sphere_irregular(12, 9, seed).mesh, "irregular sphere 98"};
    default: {
      const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(8, 16)(rng));
      return {sample_torus_regular(n, n + 3).mesh, "regular torus"};
    }
  }
}

std::vector<CurvatureResult> estimate(const Mesh& mesh, std::span<const Vec3> normals) {
  std::vector<CurvatureResult> out;
  out.reserve(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) out.push_back(aqfc_estimate(mesh, normals, v));
  return out;
}

bool usable(const CurvatureResult& r) { return !r.failed() && !r.has(kRegularized); }

// Fitted patch plus everything the fit-level suites need.
struct FittedPatch {
  std::vector<VertexNormal> samples;  // centred on the first sample
  FitWeights weights;
  NormalEquations system;
  SolvedQuadric solved;
};

FittedPatch fitted_patch(std::mt19937_64& rng) {
  FittedPatch p;
  const int count = std::uniform_int_distribution<int>(9, 30)(rng);
  p.samples = random_patch(rng, count);
  const Vec3 origin = p.samples.front().position;
  for (auto& s : p.samples) s.position -= origin;
  p.weights = compute_weights(p.samples);
  p.system = assemble_normal_equations(p.samples, p.weights);
  p.solved = solve_quadric(p.system);
  return p;
}

}  // namespace

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond quat(g(rng), g(rng), g(rng), g(rng));
  quat.normalize();
  return quat.toRotationMatrix();
}

std::vector<VertexNormal> random_patch(std::mt19937_64& rng, int count) {
  const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2), c = uniform(rng, -2, 2);
  const double d = uniform(rng, -1, 1), e = uniform(rng, -1, 1);
  const double radius = uniform(rng, 0.05, 0.5);
  const double noise = uniform(rng, 0.0, 1e-3);
  const Mat3 R = random_rotation(rng);
  const Vec3 t(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
  std::vector<VertexNormal> out;
  for (int i = 0; i < count; ++i) {
    const double x = i == 0 ? 0.0 : uniform(rng, -radius, radius);
    const double y = i == 0 ? 0.0 : uniform(rng, -radius, radius);
    const double z = a * x * x + b * x * y + c * y * y + d * x * x * x + e * x * y * y;
    const Vec3 grad(2 * a * x + b * y + 3 * d * x * x + e * y * y, b * x + 2 * c * y + 2 * e * x * y, 0.0);
    Vec3 n = Vec3(-grad.x(), -grad.y(), 1.0).normalized();
    Vec3 pos(x, y, z);
    if (i != 0) {
      pos += noise * radius * random_unit(rng);
      n = (n + noise * random_unit(rng)).normalized();
    }
    out.push_back({R * pos + t, R * n});
  }
  return out;
}

Quadricd random_quadric(std::mt19937_64& rng) {
  Quadricd q;
  for (int i = 0; i < 10; ++i) q.coeffs[i] = uniform(rng, -1, 1);
  return q;
}

SuiteResult fit_local_minimality(std::uint64_t seed, int cases) {
  SuiteResult r{"fit local minimality"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const auto p = fitted_patch(rng);
    if (p.solved.regularized) {
      ++r.skipped;
      continue;
    }
    const auto& a = p.solved.quadric.coeffs;
    const double f0 = fit_objective(p.samples, p.weights, p.solved.quadric);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      Eigen::Matrix<double, 10, 1> delta;
      for (int i = 0; i < 10; ++i) delta[i] = std::normal_distribution<double>()(rng);
      delta *= 1e-3 * a.norm() / delta.norm();
      const double f1 = fit_objective(p.samples, p.weights, Quadricd(a + delta));
      // allow rounding in the objective evaluation itself
      worst = std::max(worst, (f0 - f1) / (1e-12 * (std::abs(f0) + 1e-300)));
    }
    note(r, worst, "case " + std::to_string(c));
  }
  return r;
}

SuiteResult normal_equation_residual(std::uint64_t seed, int cases) {
  SuiteResult r{"normal-equation residual"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const auto p = fitted_patch(rng);
    if (p.solved.regularized) {
      ++r.skipped;
      continue;
    }
    const auto& a = p.solved.quadric.coeffs;
    const double res = (p.system.matrix * a - p.system.rhs).norm();
    const double bound = 1e-8 * (p.system.matrix.norm() * a.norm() + p.system.rhs.norm());
    note(r, res / bound, "case " + std::to_string(c));
    // symmetric and positive semi-definite
    const double asym = (p.system.matrix - p.system.matrix.transpose()).norm() / p.system.matrix.norm();
    note(r, asym / 1e-12, "asymmetric matrix, case " + std::to_string(c));
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 10, 10>>(p.system.matrix,
                                                                                       Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    note(r, -min_eig / (1e-12 * p.system.matrix.norm()), "indefinite matrix, case " + std::to_string(c));
  }
  return r;
}

SuiteResult projection_properties(std::uint64_t seed, int cases) {
  SuiteResult r{"projection collinearity, residual and closest point"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const auto s = random_surface(rng);
    const Vec3 g0 = gradient(s.q, s.on_surface);
    const Vec3 V = s.on_surface + uniform(rng, -0.1, 0.1) * g0.normalized();
    const Projection proj = project_point(s.q, V);
    if (proj.first_order) {
      ++r.skipped;
      continue;
    }
    const Vec3& W = proj.point;
    const std::string tag = "case " + std::to_string(c);
    const double eps_q = 1e-10 * (1.0 + std::abs(evaluate(s.q, V)));
    note(r, std::abs(evaluate(s.q, W)) / eps_q, tag + ": on-surface residual");
    if ((V - W).norm() > eps_q) note(r, projection_angle(s.q, V, W) / 1e-8, tag + ": collinearity");

    // No on-quadric point found along 1000 random lines is closer.
    const double dist = (V - W).norm();
    const Mat3 H = hessian(s.q);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Vec3 base = k % 2 == 0 ? V : Vec3(W + 0.2 * uniform(rng, 0, 1) * random_unit(rng));
      const Vec3 d = random_unit(rng);
      const double A = 0.5 * d.dot(H * d), B = gradient(s.q, base).dot(d), C = evaluate(s.q, base);
      std::vector<double> roots;
      if (std::abs(A) < 1e-14) {
        if (std::abs(B) > 1e-14) roots.push_back(-C / B);
      } else {
        const double disc = B * B - 4 * A * C;
        if (disc < 0) continue;
        const double sq = std::sqrt(disc);
        const double q0 = -0.5 * (B + (B >= 0 ? sq : -sq));
        if (q0 != 0.0) roots.push_back(C / q0);
        roots.push_back(q0 / A);
      }
      for (double t : roots) {
        Vec3 w = base + t * d;
        // one Newton polish along the line for a tight on-surface witness
        const double slope = gradient(s.q, w).dot(d);
        if (std::abs(slope) > 1e-12) w -= (evaluate(s.q, w) / slope) * d;
        worst = std::max(worst, (dist - (V - w).norm()) / 1e-9);
      }
    }
    note(r, worst, tag + ": closer witness found");
  }
  return r;
}

SuiteResult derivative_agreement(std::uint64_t seed, int cases) {
  SuiteResult r{"gradient/Hessian finite differences"};
  std::mt19937_64 rng(seed);
  constexpr double h = 1e-5;
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const Quadricd q = random_quadric(rng);
    const Vec3 p(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    Vec3 fd_grad;
    Mat3 fd_hess;
    for (int i = 0; i < 3; ++i) {
      const Vec3 e = h * Vec3::Unit(i);
      fd_grad[i] = (evaluate(q, Vec3(p + e)) - evaluate(q, Vec3(p - e))) / (2 * h);
      fd_hess.col(i) = (gradient(q, Vec3(p + e)) - gradient(q, Vec3(p - e))) / (2 * h);
    }
    const Vec3 g = gradient(q, p);
    const Mat3 H = hessian(q);
    // relative, with a 1e-3 floor for near-critical points
    note(r, (g - fd_grad).norm() / (1e-6 * (g.norm() + 1e-3)), "gradient, case " + std::to_string(c));
    note(r, (H - fd_hess).norm() / (1e-6 * (H.norm() + 1e-3)), "Hessian, case " + std::to_string(c));
  }
  return r;
}

SuiteResult rigid_motion_invariance(std::uint64_t seed, int cases) {
  SuiteResult r{"rigid-motion invariance of H and K"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const auto mc = random_mesh(rng, c);
    const Mat3 R = random_rotation(rng);
    const Vec3 t(uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -10, 10));
    std::vector<Vec3> moved_vertices;
    for (const auto& p : mc.mesh.vertices()) moved_vertices.push_back(R * p + t);
    const Mesh moved(std::move(moved_vertices), mc.mesh.faces());
    const auto before = estimate(mc.mesh, vertex_normals(mc.mesh));
    const auto after = estimate(moved, vertex_normals(moved));
    double worst = 0.0;
    for (std::size_t v = 0; v < before.size(); ++v) {
      if (!usable(before[v]) || !usable(after[v])) continue;
      worst = std::max({worst, std::abs(before[v].mean - after[v].mean) / 1e-6,
                        std::abs(before[v].gaussian - after[v].gaussian) / 1e-6});
    }
    note(r, worst, mc.label + ", case " + std::to_string(c));
  }
  return r;
}

SuiteResult normal_flip_antisymmetry(std::uint64_t seed, int cases) {
  SuiteResult r{"normal-flip antisymmetry of H"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const auto mc = random_mesh(rng, c);
    auto normals = vertex_normals(mc.mesh);
    const auto before = estimate(mc.mesh, normals);
    for (auto& n : normals) n = -n;
    const auto after = estimate(mc.mesh, normals);
    double worst = 0.0;
    for (std::size_t v = 0; v < before.size(); ++v) {
      if (!usable(before[v]) || !usable(after[v])) continue;
      worst = std::max({worst, std::abs(before[v].mean + after[v].mean) / 1e-9,
                        std::abs(before[v].gaussian - after[v].gaussian) / 1e-9});
    }
    note(r, worst, mc.label + ", case " + std::to_string(c));
  }
  return r;
}

SuiteResult consistency_triple(std::uint64_t seed, int cases) {
  SuiteResult r{"principal/mean/Gaussian/curvedness consistency"};
  std::mt19937_64 rng(seed);
  const auto check = [&](const CurvatureResult& res, const std::string& tag) {
    const double H = res.mean, K = res.gaussian;
    const double scale = std::max({H * H, std::abs(K), 1e-300});
    if (H * H >= K) {
      note(r, std::abs(res.kappa1 * res.kappa2 - K) / (1e-9 * scale), tag + ": k1*k2 != K");
      note(r, std::abs(0.5 * (res.kappa1 + res.kappa2) - H) / (1e-9 * std::sqrt(scale)), tag + ": (k1+k2)/2 != H");
    }
    if (res.kappa1 < res.kappa2) note(r, 2.0, tag + ": k1 < k2");
    if (2 * H * H >= K) {
      note(r, std::abs(res.curvedness * res.curvedness - (2 * H * H - K)) / (1e-9 * (2 * H * H + std::abs(K))),
           tag + ": R^2 != 2H^2 - K");
    }
    if (std::isnan(res.shape_index) != (res.curvedness < 1e-12)) note(r, 2.0, tag + ": shape index presence");
    if (std::abs(res.shape_index) > 1.0) note(r, 2.0, tag + ": shape index out of range");
  };
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const std::string tag = "case " + std::to_string(c);
    // random (H, K), then the estimator's own output on a small mesh
    const double H = uniform(rng, -5, 5);
    const double K = uniform(rng, -25, H * H);
    check(CurvatureResult::from_mean_gaussian(H, K), tag);

    // positive rescaling of the defining function
    const Vec3 g = random_unit(rng) * uniform(rng, 0.1, 10);
    Mat3 hs;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) hs(i, j) = hs(j, i) = uniform(rng, -1, 1);
    const double s = std::exp(uniform(rng, -7, 7));
    const double K0 = implicit_gaussian(g, hs), K1 = implicit_gaussian(Vec3(s * g), Mat3(s * hs));
    const double H0 = implicit_mean(g, hs), H1 = implicit_mean(Vec3(s * g), Mat3(s * hs));
    const double kscale = hs.squaredNorm() / g.squaredNorm();
    note(r, std::abs(K0 - K1) / (1e-12 * (std::abs(K0) + kscale)), tag + ": K not scale invariant");
    note(r, std::abs(H0 - H1) / (1e-12 * (std::abs(H0) + std::sqrt(kscale))), tag + ": H not scale invariant");

    if (c % 10 == 0) {
      const auto mc = random_mesh(rng, c);
      const auto results = estimate(mc.mesh, vertex_normals(mc.mesh));
      for (std::size_t v = 0; v < results.size(); ++v)
        if (!results[v].failed()) check(results[v], tag + " vertex " + std::to_string(v));
    }
  }
  return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, int cases) {
  return {fit_local_minimality(seed, cases),     normal_equation_residual(seed + 1, cases),
          projection_properties(seed + 2, cases), derivative_agreement(seed + 3, cases),
          rigid_motion_invariance(seed + 4, cases), normal_flip_antisymmetry(seed + 5, cases),
          consistency_triple(seed + 6, cases)};
}

}  // namespace aqfc::testing
