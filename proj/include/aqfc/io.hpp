// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqfc/benchmark.hpp"
#include "aqfc/curvature.hpp"
#include "aqfc/mesh.hpp"

namespace aqfc::io {

struct MeshData {
  Mesh mesh;
  std::optional<std::vector<Vec3>> normals;  // present only when every vertex has one
};

/// Wavefront OBJ: `v` and `f` records (1-based or negative indices,
/// `v/vt/vn` corners). Per-vertex normals are taken from `vn` references
/// when every vertex is referenced with one consistent normal.
MeshData read_obj(std::string_view text);

/// PLY 1.0, ascii or binary_little_endian. Reads `vertex` (x, y, z and
/// optional nx, ny, nz) and `face` (vertex_indices / vertex_index list);
/// other elements are skipped.
MeshData read_ply(std::string_view bytes);

/// Dispatches on the file extension (.obj / .ply).
MeshData read_mesh_file(const std::filesystem::path& path);

enum class ScalarField { kMean, kGaussian, kCurvedness, kShapeIndex };

ScalarField parse_scalar_field(std::string_view name);
std::string_view to_string(ScalarField field);
double field_value(const CurvatureResult& r, ScalarField field);

/// Blue -> green -> red over [lower, upper]; values outside are clamped and
/// NaN maps to mid-gray.
class ColorMap {
 public:
  using Rgb = std::array<std::uint8_t, 3>;
  static constexpr Rgb kNaNColor{128, 128, 128};

  ColorMap(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  Rgb operator()(double value) const;

 private:
  double lower_;
  double upper_;
};

/// Ground-truth bounds when available, [0, 200] for curvedness, [-1, 1] for
/// the shape index, otherwise the 2nd/98th percentile of finite values.
ColorMap default_colormap(ScalarField field, std::span<const CurvatureResult> results,
                          const GroundTruth* truth = nullptr);

enum class PlyEncoding { kAscii, kBinaryLittleEndian };

/// Mesh with one scalar field as `quality` plus its colour.
std::string write_ply(const Mesh& mesh, std::span<const CurvatureResult> results, ScalarField field,
                      const ColorMap& colormap, PlyEncoding encoding = PlyEncoding::kAscii);

/// Geometry only, double precision, for replaying sampled meshes.
std::string write_mesh_ply(const Mesh& mesh);

struct NamedReport {
  std::string name;
  std::string method;
  ErrorReport report;
};

/// `name,method,h_min,h_max,h_avg,k_min,k_max,k_avg,n_failed`, reals with 6
/// significant digits. `comments` are emitted first as `# ...` lines.
std::string write_csv_report(std::span<const NamedReport> reports, std::span<const std::string> comments = {});

/// Min / max / mean of the raw estimates, for meshes without ground truth.
struct EstimateSummary {
  double h_min = 0.0, h_max = 0.0, h_mean = 0.0;
  double k_min = 0.0, k_max = 0.0, k_mean = 0.0;
  std::size_t n_failed = 0;
};
EstimateSummary summarize(std::span<const CurvatureResult> results);
std::string write_summary_csv(std::string_view name, std::string_view method, const EstimateSummary& summary,
                              std::span<const std::string> comments = {});

/// `vertex,theta,phi,mean,gaussian` with round-trip precision.
std::string write_ground_truth_csv(const GroundTruth& truth);

/// One line per vertex: `vertex_index a11 a22 a33 a12 a13 a23 a14 a24 a34 a44 flags`.
std::string write_quadric_dump(std::span<const AqfcDetail> details);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace aqfc::io
