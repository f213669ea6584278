// SPDX-License-Identifier: Apache-2.0
#include "aqfc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "aqfc/errors.hpp"

namespace aqfc {

namespace {

// Turns per-vertex lists into CSR arrays.
void to_csr(std::vector<std::vector<std::size_t>>& lists, std::vector<std::size_t>& offsets,
            std::vector<std::size_t>& data) {
  offsets.assign(lists.size() + 1, 0);
  for (std::size_t i = 0; i < lists.size(); ++i) offsets[i + 1] = offsets[i] + lists[i].size();
  data.clear();
  data.reserve(offsets.back());
  for (auto& l : lists) {
    data.insert(data.end(), l.begin(), l.end());
    std::vector<std::size_t>().swap(l);
  }
}

}  // namespace

Mesh::Mesh(std::vector<Vec3> vertices, const std::vector<std::vector<std::size_t>>& faces)
    : vertices_(std::move(vertices)) {
  const std::size_t nv = vertices_.size();

  face_offsets_.assign(faces.size() + 1, 0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    if (face.size() < 3) {
      throw StructuralError("face " + std::to_string(f) + " has fewer than 3 corners");
    }
    for (std::size_t i = 0; i < face.size(); ++i) {
      if (face[i] >= nv) {
        throw StructuralError("face " + std::to_string(f) + " references vertex " +
                              std::to_string(face[i]) + " but the mesh has " + std::to_string(nv) +
                              " vertices");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (face[j] == face[i]) {
          throw StructuralError("face " + std::to_string(f) + " repeats vertex " +
                                std::to_string(face[i]));
        }
      }
    }
    if (face.size() != 3) all_triangles_ = false;
    face_offsets_[f + 1] = face_offsets_[f] + face.size();
  }
  face_indices_.reserve(face_offsets_.back());
  for (const auto& face : faces) face_indices_.insert(face_indices_.end(), face.begin(), face.end());

  // vertex -> faces
  std::vector<std::vector<std::size_t>> lists(nv);
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (std::size_t v : faces[f]) lists[v].push_back(f);
  to_csr(lists, vf_offsets_, vf_);

  // edges with their face multiplicity
  std::vector<std::pair<std::size_t, std::size_t>> half;
  half.reserve(face_indices_.size());
  for (const auto& face : faces) {
    for (std::size_t i = 0; i < face.size(); ++i) {
      std::size_t a = face[i], b = face[(i + 1) % face.size()];
      half.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(half.begin(), half.end());
  boundary_.assign(nv, 0);
  lists.assign(nv, {});
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j] == half[i]) ++j;
    const auto [a, b] = half[i];
    const std::size_t count = j - i;
    if (count != 2) closed_ = false;
    if (count == 1) boundary_[a] = boundary_[b] = 1;
    lists[a].push_back(b);
    lists[b].push_back(a);
    ++num_edges_;
    i = j;
  }
  for (auto& l : lists) std::sort(l.begin(), l.end());
  to_csr(lists, vv_offsets_, vv_);

  // vertex -> every vertex sharing a face
  lists.assign(nv, {});
  for (std::size_t v = 0; v < nv; ++v) {
    auto& l = lists[v];
    for (std::size_t f : vertex_faces(v))
      for (std::size_t w : face(f))
        if (w != v) l.push_back(w);
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  to_csr(lists, vr_offsets_, vr_);

  if (nv > 0) {
    Vec3 lo = vertices_.front(), hi = vertices_.front();
    for (const auto& p : vertices_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    bbox_diag2_ = (hi - lo).squaredNorm();
  }
}

std::vector<std::vector<std::size_t>> Mesh::faces() const {
  std::vector<std::vector<std::size_t>> out(num_faces());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto c = face(f);
    out[f].assign(c.begin(), c.end());
  }
  return out;
}

namespace {

// Unnormalized normal: 2 * area * unit normal.
Vec3 area_vector(const Mesh& mesh, std::size_t f) {
  const auto c = mesh.face(f);
  if (c.size() == 3) {
    const Vec3& a = mesh.vertex(c[0]);
    return (mesh.vertex(c[1]) - a).cross(mesh.vertex(c[2]) - a);
  }
  // Newell
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3& p = mesh.vertex(c[i]);
    const Vec3& q = mesh.vertex(c[(i + 1) % c.size()]);
    n.x() += (p.y() - q.y()) * (p.z() + q.z());
    n.y() += (p.z() - q.z()) * (p.x() + q.x());
    n.z() += (p.x() - q.x()) * (p.y() + q.y());
  }
  return n;
}

bool degenerate(const Mesh& mesh, const Vec3& n) {
  return n.norm() < 1e-14 * mesh.bbox_diagonal_squared();
}

}  // namespace

Vec3 face_normal(const Mesh& mesh, std::size_t f) {
  const Vec3 n = area_vector(mesh, f);
  if (degenerate(mesh, n) || n.norm() == 0.0) {
    throw DegenerateFaceError(f, "face " + std::to_string(f) + " has zero area");
  }
  return n.normalized();
}

VertexNormalField try_vertex_normals(const Mesh& mesh) {
  const std::size_t nf = mesh.num_faces();
  std::vector<Vec3> unit(nf);
  std::vector<unsigned char> ok(nf, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    const Vec3 n = area_vector(mesh, f);
    if (!degenerate(mesh, n) && n.norm() > 0.0) {
      unit[f] = n.normalized();
      ok[f] = 1;
    }
  }

  VertexNormalField out;
  out.normals.resize(mesh.num_vertices());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    Vec3 sum = Vec3::Zero();
    std::size_t count = 0;
    for (std::size_t f : mesh.vertex_faces(v)) {
      if (!ok[f]) continue;
      sum += unit[f];
      ++count;
    }
    if (count == 0) {
      out.normals[v] = Vec3::Constant(nan);
      out.failed.push_back(v);
      continue;
    }
    sum /= static_cast<double>(count);
    if (sum.norm() < 1e-10) {
      out.normals[v] = Vec3::Constant(nan);
      out.failed.push_back(v);
      continue;
    }
    out.normals[v] = sum.normalized();
  }
  return out;
}

std::vector<Vec3> vertex_normals(const Mesh& mesh) {
  VertexNormalField field = try_vertex_normals(mesh);
  if (!field.failed.empty()) {
    const std::size_t v = field.failed.front();
    bool isolated = true;
    for (std::size_t f : mesh.vertex_faces(v)) {
      if (!degenerate(mesh, area_vector(mesh, f))) isolated = false;
    }
    if (isolated) {
      std::string list;
      for (std::size_t w : field.failed) list += (list.empty() ? "" : ", ") + std::to_string(w);
      throw StructuralError("vertices without a non-degenerate incident face: " + list);
    }
    throw DegenerateNormalError(v, "averaged normal of vertex " + std::to_string(v) +
                                       " vanishes (opposing face normals)");
  }
  return std::move(field.normals);
}

RingExpansion grow_rings(const Mesh& mesh, std::size_t vertex, std::size_t min_count) {
  RingExpansion out;
  out.vertices.push_back(vertex);
  out.ring_offsets = {0, 1};

  std::vector<std::size_t> seen{vertex};  // sorted
  std::vector<std::size_t> next;
  while (out.vertices.size() < min_count) {
    const std::size_t begin = out.ring_offsets[out.ring_offsets.size() - 2];
    const std::size_t end = out.ring_offsets.back();
    next.clear();
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t w : mesh.ring_neighbors(out.vertices[i])) {
        if (!std::binary_search(seen.begin(), seen.end(), w)) next.push_back(w);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) break;
    out.vertices.insert(out.vertices.end(), next.begin(), next.end());
    out.ring_offsets.push_back(out.vertices.size());
    const std::size_t mid = seen.size();
    seen.insert(seen.end(), next.begin(), next.end());
    std::inplace_merge(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(mid), seen.end());
  }
  return out;
}

Neighborhood neighborhood(const Mesh& mesh, std::span<const Vec3> normals, std::size_t vertex,
                          std::size_t m) {
  if (m < kMinNeighborhoodSize) {
    throw std::invalid_argument("neighbourhood size " + std::to_string(m) + " is below the minimum of " +
                                std::to_string(kMinNeighborhoodSize));
  }
  if (vertex >= mesh.num_vertices()) {
    throw std::out_of_range("vertex " + std::to_string(vertex) + " out of range");
  }
  RingExpansion rings = grow_rings(mesh, vertex, m);
  if (rings.vertices.size() < m) {
    throw NeighborhoodError(rings.vertices.size(),
                            "component of vertex " + std::to_string(vertex) + " has only " +
                                std::to_string(rings.vertices.size()) + " vertices, need " +
                                std::to_string(m));
  }
  Neighborhood out;
  out.ring_depth = rings.depth();
  out.indices = std::move(rings.vertices);
  out.samples.reserve(out.indices.size());
  for (std::size_t v : out.indices) out.samples.push_back({mesh.vertex(v), normals[v]});
  return out;
}

}  // namespace aqfc
