// SPDX-License-Identifier: Apache-2.0
#include "aqfc/curvature.hpp"

#include <algorithm>
#include <numbers>
#include <thread>

namespace aqfc {

Vec3 corrected_gradient(const Vec3& normal, const Quadricd& q, const Vec3& foot) {
  const Vec3 g = gradient(q, foot);
  const double len = g.norm();
  if (!(len > 1e-12)) throw SingularPointError("vanishing quadric gradient at the foot point");
  return (normal.norm() / len) * g;
}

std::pair<double, double> principal_curvatures(double H, double K) {
  const double d = std::sqrt(std::max(H * H - K, 0.0));
  return {H + d, H - d};
}

double curvedness(double H, double K) { return std::sqrt(std::max(2.0 * H * H - K, 0.0)); }

std::optional<double> shape_index(double H, double K) {
  if (!(curvedness(H, K) >= 1e-12)) return std::nullopt;
  const auto [k1, k2] = principal_curvatures(H, K);
  return -(2.0 / std::numbers::pi) * std::atan2(k1 + k2, k1 - k2);
}

std::string flag_names(std::uint8_t flags) {
  static constexpr std::pair<CurvatureFlag, const char*> kNames[] = {
      {kRegularized, "regularized"},
      {kFirstOrderProjection, "first_order_projection"},
      {kDegenerateToPlane, "degenerate_to_plane"},
      {kFitFailed, "fit_failed"},
      {kBoundaryVertex, "boundary_vertex"},
  };
  std::string out;
  for (const auto& [f, name] : kNames) {
    if (flags & f) out += (out.empty() ? "" : ",") + std::string(name);
  }
  return out.empty() ? "-" : out;
}

CurvatureResult CurvatureResult::from_mean_gaussian(double H, double K, std::uint8_t flags) {
  CurvatureResult r;
  r.mean = H;
  r.gaussian = K;
  std::tie(r.kappa1, r.kappa2) = principal_curvatures(H, K);
  r.curvedness = aqfc::curvedness(H, K);
  r.shape_index = aqfc::shape_index(H, K).value_or(kNaN);
  r.flags = flags;
  return r;
}

AqfcDetail aqfc_estimate_detailed(const Mesh& mesh, std::span<const Vec3> normals, std::size_t vertex,
                                  const AqfcParams& params) {
  AqfcDetail out;
  std::uint8_t flags = mesh.is_boundary(vertex) ? kBoundaryVertex : 0;
  out.result = CurvatureResult::failure(flags);
  if (!normals[vertex].allFinite()) return out;

  try {
    Neighborhood nb = neighborhood(mesh, normals, vertex, params.m);
    // Vertices whose normal could not be computed do not take part in the fit.
    if (std::any_of(nb.samples.begin(), nb.samples.end(), [](const auto& s) { return !s.normal.allFinite(); })) {
      std::size_t keep = 0;
      for (std::size_t i = 0; i < nb.samples.size(); ++i) {
        if (!nb.samples[i].normal.allFinite()) continue;
        nb.samples[keep] = nb.samples[i];
        nb.indices[keep] = nb.indices[i];
        ++keep;
      }
      nb.samples.resize(keep);
      nb.indices.resize(keep);
      if (keep < kMinNeighborhoodSize) return out;
    }

    const LocalFit fit = fit_quadric(nb);
    if (fit.solved.regularized) flags |= kRegularized;
    if (fit.solved.degenerate_to_plane) flags |= kDegenerateToPlane;
    out.world_quadric = fit.world();
    out.result.flags |= flags;

    const Quadricd& q = fit.solved.quadric;
    const Projection proj = project_point(q, Vec3::Zero(), params.projection);
    if (proj.first_order) flags |= kFirstOrderProjection;

    const Vec3 s = corrected_gradient(normals[vertex], q, proj.point);
    const Mat3 hess = hessian(q);
    const double K = implicit_gaussian(s, hess);
    const double H = implicit_mean(s, hess);
    if (!std::isfinite(H) || !std::isfinite(K)) {
      out.result = CurvatureResult::failure(flags);
      return out;
    }
    out.result = CurvatureResult::from_mean_gaussian(H, K, flags);
    out.foot = proj.point + fit.origin;
  } catch (const std::runtime_error&) {
    // neighbourhood, fit, projection or singular-point failure
    out.result = CurvatureResult::failure(flags);
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<CurvatureResult> estimate_all(const Mesh& mesh, std::span<const Vec3> normals, Method method,
                                          const AqfcParams& params, unsigned threads) {
  std::vector<CurvatureResult> out(mesh.num_vertices());
  if (method == Method::kAqfc) {
    parallel_for(out.size(), threads, [&](std::size_t v) { out[v] = aqfc_estimate(mesh, normals, v, params); });
  } else {
    parallel_for(out.size(), threads, [&](std::size_t v) { out[v] = ddgo_estimate(mesh, v); });
  }
  return out;
}

std::vector<AqfcDetail> aqfc_estimate_all_detailed(const Mesh& mesh, std::span<const Vec3> normals,
                                                   const AqfcParams& params, unsigned threads) {
  std::vector<AqfcDetail> out(mesh.num_vertices());
  parallel_for(out.size(), threads,
               [&](std::size_t v) { out[v] = aqfc_estimate_detailed(mesh, normals, v, params); });
  return out;
}

}  // namespace aqfc
