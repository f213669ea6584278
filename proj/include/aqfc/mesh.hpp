// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace aqfc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Immutable polygon mesh with eagerly built adjacency.
///
/// Faces are stored counter-clockwise as seen from outside. Two kinds of
/// vertex adjacency are kept: `vertex_neighbors` follows edges, while
/// `ring_neighbors` collects every vertex sharing a face (the one-ring used
/// for neighbourhood growth; on triangle meshes the two coincide).
class Mesh {
 public:
  Mesh() = default;

  /// Validates and builds adjacency. Throws StructuralError on an
  /// out-of-range index or a face with fewer than 3 distinct corners.
  Mesh(std::vector<Vec3> vertices, const std::vector<std::vector<std::size_t>>& faces);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return face_offsets_.empty() ? 0 : face_offsets_.size() - 1; }
  std::size_t num_edges() const { return num_edges_; }

  const Vec3& vertex(std::size_t v) const { return vertices_[v]; }
  std::span<const Vec3> vertices() const { return vertices_; }

  std::span<const std::size_t> face(std::size_t f) const {
    return {face_indices_.data() + face_offsets_[f], face_offsets_[f + 1] - face_offsets_[f]};
  }
  std::vector<std::vector<std::size_t>> faces() const;

  std::span<const std::size_t> vertex_faces(std::size_t v) const { return slice(vf_offsets_, vf_, v); }
  std::span<const std::size_t> vertex_neighbors(std::size_t v) const { return slice(vv_offsets_, vv_, v); }
  std::span<const std::size_t> ring_neighbors(std::size_t v) const { return slice(vr_offsets_, vr_, v); }

  /// Vertex touches an edge used by exactly one face.
  bool is_boundary(std::size_t v) const { return boundary_[v] != 0; }
  /// Every edge is shared by exactly two faces.
  bool is_closed() const { return closed_; }
  bool all_triangles() const { return all_triangles_; }

  long euler_characteristic() const {
    return static_cast<long>(num_vertices()) - static_cast<long>(num_edges()) +
           static_cast<long>(num_faces());
  }

  /// Squared diagonal of the axis-aligned bounding box.
  double bbox_diagonal_squared() const { return bbox_diag2_; }

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.vertices_ == b.vertices_ && a.face_offsets_ == b.face_offsets_ &&
           a.face_indices_ == b.face_indices_;
  }

 private:
  static std::span<const std::size_t> slice(const std::vector<std::size_t>& offsets,
                                            const std::vector<std::size_t>& data, std::size_t i) {
    return {data.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }

  std::vector<Vec3> vertices_;
  std::vector<std::size_t> face_offsets_;
  std::vector<std::size_t> face_indices_;
  std::vector<std::size_t> vf_offsets_, vf_;
  std::vector<std::size_t> vv_offsets_, vv_;
  std::vector<std::size_t> vr_offsets_, vr_;
  std::vector<unsigned char> boundary_;
  std::size_t num_edges_ = 0;
  bool closed_ = true;
  bool all_triangles_ = true;
  double bbox_diag2_ = 0.0;
};

inline Mesh build_mesh(std::vector<Vec3> vertices, const std::vector<std::vector<std::size_t>>& faces) {
  return Mesh(std::move(vertices), faces);
}

/// A position paired with its unit normal.
struct VertexNormal {
  Vec3 position;
  Vec3 normal;
};

/// Unit face normal; cross product for triangles, Newell's method otherwise.
/// Throws DegenerateFaceError for zero-area faces.
Vec3 face_normal(const Mesh& mesh, std::size_t face);

/// Unweighted mean of incident face normals, renormalized. Throws
/// StructuralError for isolated vertices and DegenerateNormalError when the
/// average cancels.
std::vector<Vec3> vertex_normals(const Mesh& mesh);

/// Same averaging, but failures are recorded instead of thrown: offending
/// vertices get a NaN normal and are listed in `failed`.
struct VertexNormalField {
  std::vector<Vec3> normals;
  std::vector<std::size_t> failed;
};
VertexNormalField try_vertex_normals(const Mesh& mesh);

/// Breadth-first ring expansion over face-sharing adjacency. Whole rings
/// are appended until at least `min_count` vertices are collected. Within a
/// ring vertices are sorted by index; `ring_offsets[k]` is where ring k starts.
struct RingExpansion {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> ring_offsets;
  std::size_t depth() const { return ring_offsets.size() - 2; }  // 0 = centre only
};
RingExpansion grow_rings(const Mesh& mesh, std::size_t vertex, std::size_t min_count);

inline constexpr std::size_t kMinNeighborhoodSize = 9;
inline constexpr std::size_t kDefaultNeighborhoodSize = 9;

struct Neighborhood {
  std::vector<VertexNormal> samples;  // samples.front() is the centre
  std::vector<std::size_t> indices;   // mesh vertex of each sample
  std::size_t ring_depth = 0;

  const VertexNormal& center() const { return samples.front(); }
  std::size_t size() const { return samples.size(); }
};

/// Smallest whole-ring neighbourhood of `vertex` with at least m samples.
/// Requires m >= kMinNeighborhoodSize.
Neighborhood neighborhood(const Mesh& mesh, std::span<const Vec3> normals, std::size_t vertex,
                          std::size_t m);

}  // namespace aqfc
