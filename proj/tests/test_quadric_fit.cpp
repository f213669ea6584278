// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "aqfc/errors.hpp"
#include "aqfc/quadric.hpp"
#include "aqfc/quadric_fit.hpp"
#include "support/invariants.hpp"

using namespace aqfc;

namespace {

using LD = long double;
using Coeffs = Eigen::Matrix<double, 10, 1>;

// Independent long-double evaluation of the fitting objective.
LD objective_ld(std::span<const VertexNormal> s, const FitWeights& w, const Eigen::Matrix<LD, 10, 1>& a) {
  LD f = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const LD x = s[i].position.x(), y = s[i].position.y(), z = s[i].position.z();
    const LD q = a[0] * x * x + a[1] * y * y + a[2] * z * z + a[3] * x * y + a[4] * x * z + a[5] * y * z +
                 a[6] * x + a[7] * y + a[8] * z + a[9];
    const LD gx = 2 * a[0] * x + a[3] * y + a[4] * z + a[6];
    const LD gy = a[3] * x + 2 * a[1] * y + a[5] * z + a[7];
    const LD gz = a[4] * x + a[5] * y + 2 * a[2] * z + a[8];
    const LD dx = s[i].normal.x() - gx, dy = s[i].normal.y() - gy, dz = s[i].normal.z() - gz;
    f += LD(w.position[i]) * q * q + LD(w.normal[i]) * (dx * dx + dy * dy + dz * dz);
  }
  return f;
}

// Recover matrix and rhs of f(a) = a'Ma - 2r'a + c by polarization.
std::pair<Eigen::Matrix<LD, 10, 10>, Eigen::Matrix<LD, 10, 1>> polarized_system(std::span<const VertexNormal> s,
                                                                                const FitWeights& w) {
  using V = Eigen::Matrix<LD, 10, 1>;
  const auto f = [&](const V& a) { return objective_ld(s, w, a); };
  const LD c = f(V::Zero());
  Eigen::Matrix<LD, 10, 10> M;
  V r;
  for (int i = 0; i < 10; ++i) {
    const V e = V::Unit(i);
    M(i, i) = (f(e) + f(-e)) / 2 - c;
    r[i] = (f(-e) - f(e)) / 4;
  }
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) {
      M(i, j) = M(j, i) = (f(V::Unit(i) + V::Unit(j)) - M(i, i) - M(j, j) + 2 * r[i] + 2 * r[j] - c) / 2;
    }
  return {M, r};
}

std::vector<VertexNormal> sphere_samples(std::mt19937_64& rng, int count) {
  std::normal_distribution<double> g;
  std::vector<VertexNormal> out;
  for (int i = 0; i < count; ++i) {
    const Vec3 p = Vec3(g(rng), g(rng), g(rng)).normalized();
    out.push_back({p, p});
  }
  return out;
}

}  // namespace

TEST_CASE("weights follow the distance and normal-deviation formula") {
  const std::vector<VertexNormal> s{{{0, 0, 0}, {0, 0, 1}}, {{1, 0, 0}, {0, 0, 1}}, {{0, 0, 0}, {0, 0, -1}}};
  const auto w = compute_weights(s);
  CHECK(w.position[0] == 1.0);
  CHECK(w.normal[0] == 1e-4);
  CHECK(w.position[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(w.normal[1] == 1e-4);
  CHECK(w.position[2] == 1.0);
  CHECK(w.normal[2] == doctest::Approx(1e-4 * std::exp(-4.0)).epsilon(1e-15));
  CHECK(w.position[1] == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(w.normal[2] == doctest::Approx(1.8316e-6).epsilon(1e-4));
}

TEST_CASE("single sample at the origin puts the normal into the a34 slot") {
  const std::vector<VertexNormal> s{{{0, 0, 0}, {0, 0, 1}}};
  const auto sys = assemble_normal_equations(s, FitWeights{{1.0}, {1.0}});
  for (int i = 0; i < 10; ++i) CHECK(sys.rhs[i] == (i == Quadricd::A34 ? 1.0 : 0.0));
}

TEST_CASE("normal equations match the polarized objective") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    const auto s = aqfc::testing::random_patch(rng, 9 + k);
    std::vector<VertexNormal> local(s);
    for (auto& p : local) p.position -= s.front().position;
    const auto w = compute_weights(local);
    const auto sys = assemble_normal_equations(local, w);
    const auto [M, r] = polarized_system(local, w);
    const double scale = sys.matrix.norm();
    CHECK((sys.matrix.cast<LD>() - M).norm() < 1e-12 * scale);
    CHECK((sys.rhs.cast<LD>() - r).norm() < 1e-12 * (sys.rhs.norm() + scale));
    CHECK((sys.matrix - sys.matrix.transpose()).norm() <= 1e-12 * scale);
  }
}

TEST_CASE("zero-residual sphere system is solved exactly") {
  std::mt19937_64 rng(22);
  const auto s = sphere_samples(rng, 20);
  const auto w = compute_weights(s);
  const auto sys = assemble_normal_equations(s, w);
  const Coeffs a = Quadricd::sphere().coeffs;
  CHECK((sys.matrix * a - sys.rhs).norm() <= 1e-10 * sys.rhs.norm());
  CHECK(fit_objective(s, w, Quadricd::sphere()) < 1e-28);

  const auto solved = solve_quadric(sys);
  CHECK_FALSE(solved.regularized);
  CHECK_FALSE(solved.degenerate_to_plane);
  CHECK((solved.quadric.coeffs - a).cwiseAbs().maxCoeff() < 1e-9);

  // higher-precision dense solve as oracle
  const Eigen::Matrix<LD, 10, 1> oracle = sys.matrix.cast<LD>().fullPivLu().solve(sys.rhs.cast<LD>());
  CHECK((solved.quadric.coeffs.cast<LD>() - oracle).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("planar samples give a plane-degenerate fit") {
  std::vector<VertexNormal> s;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) s.push_back({{0.2 * i, 0.2 * j, 0.0}, {0, 0, 1}});
  std::swap(s[0], s[12]);  // centre first
  const auto w = compute_weights(s);
  const auto sys = assemble_normal_equations(s, w);
  const auto solved = solve_quadric(sys);
  CHECK(solved.degenerate_to_plane);
  // z-dependent monomials vanish on the plane, so the ladder fires and shrinks a34 slightly
  REQUIRE(solved.regularized);
  const Eigen::Matrix<LD, 10, 10> shifted_matrix =
      sys.matrix.cast<LD>() + LD(solved.lambda) * Eigen::Matrix<LD, 10, 10>::Identity();
  const Eigen::Matrix<LD, 10, 1> oracle = shifted_matrix.fullPivLu().solve(sys.rhs.cast<LD>());
  CHECK((solved.quadric.coeffs.cast<LD>() - oracle).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(solved.quadric[Quadricd::A34] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(solved.quadric.coeffs.head<6>().cwiseAbs().maxCoeff() < 1e-9);
  CHECK(fit_objective(s, w, solved.quadric) < 1e-12);
}

TEST_CASE("identity system with zero rhs gives the zero quadric") {
  NormalEquations sys;
  sys.matrix.setIdentity();
  const auto solved = solve_quadric(sys);
  CHECK(solved.quadric.coeffs.isZero(0.0));
  CHECK(solved.degenerate_to_plane);
}

TEST_CASE("singular systems fall back to Tikhonov regularization") {
  NormalEquations sys;
  sys.matrix(0, 0) = 1.0;
  sys.rhs[0] = 2.0;
  const auto solved = solve_quadric(sys);
  CHECK(solved.regularized);
  CHECK(solved.lambda > 0.0);
  CHECK(solved.quadric[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("evaluate, gradient and Hessian") {
  const Quadricd sphere = Quadricd::sphere();
  CHECK(evaluate(sphere, Vec3(1, 0, 0)) == 0.0);
  CHECK(evaluate(sphere, Vec3(0, 0, 0)) == -0.5);
  CHECK(evaluate(Quadricd(), Vec3(3, -2, 7)) == 0.0);
  CHECK(gradient(sphere, Vec3(1, 0, 0)) == Vec3(1, 0, 0));
  CHECK(hessian(sphere) == Mat3::Identity());

  Quadricd plane;
  plane[Quadricd::A34] = 1.0;
  CHECK(gradient(plane, Vec3(4, 5, 6)) == Vec3(0, 0, 1));
  CHECK(hessian(plane).isZero(0.0));

  Quadricd saddle;
  saddle[Quadricd::A12] = 1.0;
  Mat3 expected = Mat3::Zero();
  expected(0, 1) = expected(1, 0) = 1.0;
  CHECK(hessian(saddle) == expected);
}

TEST_CASE("monomials and their gradients are consistent with evaluate") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    const Quadricd q = aqfc::testing::random_quadric(rng);
    const Vec3 p = Vec3::Random();
    CHECK(monomials(p).dot(q.coeffs) == doctest::Approx(evaluate(q, p)).epsilon(1e-14));
    CHECK((monomial_gradients(p) * q.coeffs - gradient(q, p)).norm() < 1e-14);
  }
}

TEST_CASE("shifted transports a quadric exactly") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 50; ++k) {
    const Quadricd q = aqfc::testing::random_quadric(rng);
    const Vec3 c(u(rng), u(rng), u(rng));
    const Quadricd r = shifted(q, c);
    for (int j = 0; j < 5; ++j) {
      const Vec3 x(u(rng), u(rng), u(rng));
      CHECK(evaluate(r, x) == doctest::Approx(evaluate(q, Vec3(x - c))).epsilon(1e-12).scale(10.0));
    }
  }
}

TEST_CASE("projection onto the unit sphere") {
  const Quadricd sphere = Quadricd::sphere();
  const auto on = project_point(sphere, Vec3(1, 0, 0));
  CHECK(on.point == Vec3(1, 0, 0));
  CHECK_FALSE(on.first_order);

  const auto far = project_point(sphere, Vec3(2, 0, 0));
  CHECK((far.point - Vec3(1, 0, 0)).norm() < 1e-9);

  const Vec3 v(0.3, -0.2, 0.9);
  const auto near = project_point(sphere, v);
  CHECK((near.point - v.normalized()).norm() < 1e-9);
  CHECK(projection_angle(sphere, v, near.point) < 1e-8);

  CHECK_THROWS_AS(project_point(sphere, Vec3(0, 0, 0)), ProjectionError);
}

TEST_CASE("projection falls back to first-order steps when Newton is cut short") {
  ProjectionOptions opts;
  opts.max_iterations = 0;
  const Vec3 v(0.3, -0.2, 0.9);
  const auto p = project_point(Quadricd::sphere(), v, opts);
  CHECK(p.first_order);
  CHECK(std::abs(evaluate(Quadricd::sphere(), p.point)) < 1e-12);
}

TEST_CASE("local fit transports back to world coordinates") {
  std::mt19937_64 rng(25);
  auto samples = sphere_samples(rng, 30);
  const Vec3 offset(10, -4, 7);
  Neighborhood nb;
  for (auto& s : samples) {
    s.position += offset;
    nb.samples.push_back(s);
  }
  const LocalFit fit = fit_quadric(nb);
  CHECK((fit.origin - nb.center().position).norm() == 0.0);
  const Quadricd world = fit.world();
  const Quadricd expected = shifted(Quadricd::sphere(), offset);
  CHECK((world.coeffs - expected.coeffs).cwiseAbs().maxCoeff() < 1e-9);
}
