// SPDX-License-Identifier: Apache-2.0
//
// Delaunay triangulation on the flat torus [0, P)^2: the point set is tiled
// 3x3, triangulated as the dual of Boost.Polygon's (exact-predicate) Voronoi
// diagram, and every periodic triangle is kept exactly once, namely in the
// copy whose lowest-index corner lies in the central tile.
#include <algorithm>
#include <stdexcept>
#include <tuple>

#include <boost/polygon/voronoi.hpp>

#include "aqfc/benchmark.hpp"

namespace aqfc {

std::vector<std::array<std::size_t, 3>> periodic_delaunay(std::span<const std::array<std::int64_t, 2>> points,
                                                          std::int64_t period) {
  namespace bp = boost::polygon;
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("periodic triangulation needs at least 3 points");
  if (period <= 0 || 2 * period > (std::int64_t{1} << 30)) {
    throw std::invalid_argument("period must fit the 32-bit coordinate range after tiling");
  }

  std::vector<bp::point_data<int>> tiled;
  tiled.reserve(9 * n);
  for (int ty = -1; ty <= 1; ++ty) {
    for (int tx = -1; tx <= 1; ++tx) {
      for (const auto& p : points) {
        if (p[0] < 0 || p[0] >= period || p[1] < 0 || p[1] >= period) {
          throw std::invalid_argument("point outside the periodic domain");
        }
        tiled.emplace_back(static_cast<int>(p[0] + tx * period), static_cast<int>(p[1] + ty * period));
      }
    }
  }
  constexpr std::size_t kCentralTile = 4;

  bp::voronoi_diagram<double> vd;
  bp::construct_voronoi(tiled.begin(), tiled.end(), &vd);

  const auto orig = [n](std::size_t s) { return s % n; };
  const auto key = [&](std::size_t s) { return std::make_tuple(orig(s), s); };

  std::vector<std::array<std::size_t, 3>> out;
  std::vector<std::size_t> ring;
  for (const auto& vertex : vd.vertices()) {
    ring.clear();
    const auto* e = vertex.incident_edge();
    do {
      ring.push_back(e->cell()->source_index());
      e = e->rot_next();
    } while (e != vertex.incident_edge());
    if (ring.size() < 3) continue;

    std::int64_t twice_area = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const auto& a = tiled[ring[i]];
      const auto& b = tiled[ring[(i + 1) % ring.size()]];
      twice_area += std::int64_t{a.x()} * b.y() - std::int64_t{b.x()} * a.y();
    }
    if (twice_area < 0) std::reverse(ring.begin(), ring.end());

    // Cocircular sites: fan from the lowest-index site.
    const auto anchor = std::min_element(ring.begin(), ring.end(),
                                         [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::rotate(ring.begin(), anchor, ring.end());
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
      const std::array<std::size_t, 3> tri{ring[0], ring[i], ring[i + 1]};
      std::size_t lowest = 0;
      for (std::size_t j = 1; j < 3; ++j)
        if (key(tri[j]) < key(tri[lowest])) lowest = j;
      if (tri[lowest] / n != kCentralTile) continue;
      std::array<std::size_t, 3> t{orig(tri[lowest]), orig(tri[(lowest + 1) % 3]), orig(tri[(lowest + 2) % 3])};
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        throw std::runtime_error("point set too sparse for a periodic triangulation");
      }
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace aqfc
