// SPDX-License-Identifier: Apache-2.0
#include "aqfc/benchmark.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace aqfc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Vec3 torus_point(double theta, double phi) {
  const double r = 3.0 + std::cos(theta);
  return {r * std::cos(phi), r * std::sin(phi), std::sin(theta)};
}

Vec3 torus_normal(double theta, double phi) {
  return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), std::sin(theta)};
}

double torus_mean_curvature(double theta) {
  const double c = std::cos(theta);
  return -(3.0 + 2.0 * c) / (2.0 * (3.0 + c));
}

double torus_gaussian_curvature(double theta) {
  const double c = std::cos(theta);
  return c / (3.0 + c);
}

namespace {

void push_torus_truth(GroundTruth& t, double theta, double phi) {
  t.mean.push_back(torus_mean_curvature(theta));
  t.gaussian.push_back(torus_gaussian_curvature(theta));
  t.theta.push_back(theta);
  t.phi.push_back(phi);
}

}  // namespace

SampledSurface sample_torus_regular(std::size_t n_theta, std::size_t n_phi) {
  if (n_theta < 3 || n_phi < 3) throw std::invalid_argument("torus grid needs at least 3x3 samples");
  std::vector<Vec3> vertices;
  vertices.reserve(n_theta * n_phi);
  GroundTruth truth;
  for (std::size_t i = 0; i < n_theta; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n_theta);
    for (std::size_t j = 0; j < n_phi; ++j) {
      const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(n_phi);
      vertices.push_back(torus_point(theta, phi));
      push_torus_truth(truth, theta, phi);
    }
  }
  const auto id = [n_phi](std::size_t i, std::size_t j) { return i * n_phi + j; };
  std::vector<std::vector<std::size_t>> faces;
  faces.reserve(n_theta * n_phi);
  for (std::size_t i = 0; i < n_theta; ++i) {
    const std::size_t i1 = (i + 1) % n_theta;
    for (std::size_t j = 0; j < n_phi; ++j) {
      const std::size_t j1 = (j + 1) % n_phi;
      faces.push_back({id(i, j), id(i, j1), id(i1, j1), id(i1, j)});
    }
  }
  return {Mesh(std::move(vertices), faces), std::move(truth)};
}

SampledSurface sample_torus_irregular(std::size_t count, std::uint64_t seed) {
  if (count < 100) throw std::invalid_argument("irregular torus needs at least 100 samples");
  // Parameters are drawn on a 2^28 lattice so that the triangulation runs on
  // exact integer coordinates.
  constexpr int kBits = 28;
  constexpr std::int64_t kPeriod = std::int64_t{1} << kBits;
  std::mt19937_64 rng(seed);
  std::unordered_set<std::uint64_t> taken;
  std::vector<std::array<std::int64_t, 2>> lattice;  // (phi, theta): counter-clockwise faces point outward
  lattice.reserve(count);
  while (lattice.size() < count) {
    const std::uint64_t kt = rng() >> (64 - kBits);
    const std::uint64_t kp = rng() >> (64 - kBits);
    if (!taken.insert((kt << kBits) | kp).second) continue;
    lattice.push_back({static_cast<std::int64_t>(kp), static_cast<std::int64_t>(kt)});
  }

  std::vector<Vec3> vertices;
  vertices.reserve(count);
  GroundTruth truth;
  for (const auto& [kp, kt] : lattice) {
    const double theta = kTwoPi * static_cast<double>(kt) / static_cast<double>(kPeriod);
    const double phi = kTwoPi * static_cast<double>(kp) / static_cast<double>(kPeriod);
    vertices.push_back(torus_point(theta, phi));
    push_torus_truth(truth, theta, phi);
  }
  std::vector<std::vector<std::size_t>> faces;
  for (const auto& t : periodic_delaunay(lattice, kPeriod)) faces.push_back({t[0], t[1], t[2]});
  return {Mesh(std::move(vertices), faces), std::move(truth)};
}

SampledSurface sample_sphere_irregular(std::size_t n_theta, std::size_t n_phi, std::uint64_t seed) {
  if (n_theta < 3 || n_phi < 2) throw std::invalid_argument("sphere grid needs n_theta >= 3 and n_phi >= 2");
  const std::size_t rings = n_phi - 1;
  std::vector<Vec3> vertices;
  vertices.reserve(n_theta * rings + 2);
  GroundTruth truth;
  const auto add = [&](const Vec3& p, double polar, double azimuth) {
    vertices.push_back(p);
    truth.mean.push_back(-1.0);
    truth.gaussian.push_back(1.0);
    truth.theta.push_back(azimuth);
    truth.phi.push_back(polar);
  };

  add({0.0, 0.0, 1.0}, 0.0, 0.0);
  for (std::size_t r = 1; r <= rings; ++r) {
    const double polar = std::numbers::pi * static_cast<double>(r) / static_cast<double>(n_phi);
    for (std::size_t j = 0; j < n_theta; ++j) {
      const double azimuth = kTwoPi * static_cast<double>(j) / static_cast<double>(n_theta);
      add({std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)}, polar,
          azimuth);
    }
  }
  add({0.0, 0.0, -1.0}, std::numbers::pi, 0.0);
  const std::size_t north = 0, south = vertices.size() - 1;
  const auto id = [n_theta](std::size_t r, std::size_t j) { return 1 + (r - 1) * n_theta + j % n_theta; };

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> faces;
  for (std::size_t j = 0; j < n_theta; ++j) faces.push_back({north, id(1, j), id(1, j + 1)});
  for (std::size_t r = 1; r < rings; ++r) {
    for (std::size_t j = 0; j < n_theta; ++j) {
      const std::size_t a = id(r, j), b = id(r + 1, j), c = id(r + 1, j + 1), d = id(r, j + 1);
      if ((rng() >> 63) == 0) {
        faces.push_back({a, b, c});
        faces.push_back({a, c, d});
      } else {
        faces.push_back({a, b, d});
        faces.push_back({b, c, d});
      }
    }
  }
  for (std::size_t j = 0; j < n_theta; ++j) faces.push_back({south, id(rings, j + 1), id(rings, j)});
  return {Mesh(std::move(vertices), faces), std::move(truth)};
}

std::vector<Vec3> sphere_normals(const Mesh& mesh) {
  std::vector<Vec3> out;
  out.reserve(mesh.num_vertices());
  for (const auto& p : mesh.vertices()) out.push_back(p.normalized());
  return out;
}

ErrorReport error_report(std::span<const CurvatureResult> estimates, const GroundTruth& truth) {
  if (estimates.size() != truth.size()) {
    throw std::invalid_argument("estimate count " + std::to_string(estimates.size()) +
                                " does not match ground truth size " + std::to_string(truth.size()));
  }
  ErrorReport r;
  r.h_min = r.k_min = std::numeric_limits<double>::infinity();
  r.h_max = r.k_max = -std::numeric_limits<double>::infinity();
  double h_sum = 0.0, k_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t v = 0; v < estimates.size(); ++v) {
    const auto& e = estimates[v];
    if (e.failed() || !std::isfinite(e.mean) || !std::isfinite(e.gaussian)) {
      ++r.n_failed;
      continue;
    }
    r.h_min = std::min(r.h_min, e.mean);
    r.h_max = std::max(r.h_max, e.mean);
    r.k_min = std::min(r.k_min, e.gaussian);
    r.k_max = std::max(r.k_max, e.gaussian);
    h_sum += std::abs(e.mean - truth.mean[v]);
    k_sum += std::abs(e.gaussian - truth.gaussian[v]);
    ++used;
  }
  if (used == 0) throw std::runtime_error("every vertex failed; no statistics to report");
  r.h_avg = h_sum / static_cast<double>(used);
  r.k_avg = k_sum / static_cast<double>(used);
  return r;
}

}  // namespace aqfc
