// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "aqfc/io.hpp"

namespace aqfc::io {

namespace {

// Locale-independent number formatting.
void append_shortest(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void append_shortest(std::string& out, float v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void append_precision(std::string& out, double v, int digits) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  out.append(buf, r.ptr);
}

template <typename T>
void append_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void append_comments(std::string& out, std::span<const std::string> comments) {
  for (const auto& c : comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
}

}  // namespace

ScalarField parse_scalar_field(std::string_view name) {
  if (name == "mean") return ScalarField::kMean;
  if (name == "gaussian") return ScalarField::kGaussian;
  if (name == "curvedness") return ScalarField::kCurvedness;
  if (name == "shape_index") return ScalarField::kShapeIndex;
  throw std::invalid_argument("unknown scalar field '" + std::string(name) + "'");
}

std::string_view to_string(ScalarField field) {
  switch (field) {
    case ScalarField::kMean: return "mean";
    case ScalarField::kGaussian: return "gaussian";
    case ScalarField::kCurvedness: return "curvedness";
    case ScalarField::kShapeIndex: return "shape_index";
  }
  return "";
}

double field_value(const CurvatureResult& r, ScalarField field) {
  switch (field) {
    case ScalarField::kMean: return r.mean;
    case ScalarField::kGaussian: return r.gaussian;
    case ScalarField::kCurvedness: return r.curvedness;
    case ScalarField::kShapeIndex: return r.shape_index;
  }
  return CurvatureResult::kNaN;
}

ColorMap::ColorMap(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw std::invalid_argument("colormap needs finite bounds with lower < upper");
  }
}

ColorMap::Rgb ColorMap::operator()(double value) const {
  if (std::isnan(value)) return kNaNColor;
  const double t = std::clamp((value - lower_) / (upper_ - lower_), 0.0, 1.0);
  const auto byte = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 255.0))); };
  if (t <= 0.5) {
    const double s = 2.0 * t;
    return {0, byte(255.0 * s), byte(255.0 * (1.0 - s))};
  }
  const double s = 2.0 * t - 1.0;
  return {byte(255.0 * s), byte(255.0 * (1.0 - s)), 0};
}

ColorMap default_colormap(ScalarField field, std::span<const CurvatureResult> results, const GroundTruth* truth) {
  const auto widen = [](double lo, double hi) {
    if (lo < hi) return ColorMap(lo, hi);
    const double pad = 0.1 * std::max(1.0, std::abs(lo));
    return ColorMap(lo - pad, hi + pad);
  };
  if (field == ScalarField::kCurvedness) return ColorMap(0.0, 200.0);
  if (field == ScalarField::kShapeIndex) return ColorMap(-1.0, 1.0);
  if (truth != nullptr && truth->size() > 0) {
    const auto& values = field == ScalarField::kMean ? truth->mean : truth->gaussian;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return widen(*lo, *hi);
  }
  std::vector<double> finite;
  finite.reserve(results.size());
  for (const auto& r : results) {
    const double v = field_value(r, field);
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (finite.empty()) return ColorMap(-1.0, 1.0);
  std::sort(finite.begin(), finite.end());
  const auto at = [&](double p) {
    return finite[static_cast<std::size_t>(std::floor(p * static_cast<double>(finite.size() - 1)))];
  };
  return widen(at(0.02), at(0.98));
}

std::string write_ply(const Mesh& mesh, std::span<const CurvatureResult> results, ScalarField field,
                      const ColorMap& colormap, PlyEncoding encoding) {
  if (results.size() != mesh.num_vertices()) {
    throw std::invalid_argument("result count does not match vertex count");
  }
  const bool binary = encoding == PlyEncoding::kBinaryLittleEndian;
  std::string out;
  out.reserve(mesh.num_vertices() * (binary ? 19 : 64) + mesh.num_faces() * (binary ? 13 : 24) + 512);
  out += "ply\n";
  out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
  out += "comment scalar field ";
  out += to_string(field);
  out += "\nelement vertex " + std::to_string(mesh.num_vertices()) + "\n";
  out +=
      "property float x\nproperty float y\nproperty float z\nproperty float quality\n"
      "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.num_faces()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";

  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& p = mesh.vertex(v);
    const double value = field_value(results[v], field);
    const auto rgb = colormap(value);
    const float xyzq[4] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z()),
                           static_cast<float>(value)};
    if (binary) {
      for (float f : xyzq) append_le(out, f);
      out.append(reinterpret_cast<const char*>(rgb.data()), 3);
      continue;
    }
    for (float f : xyzq) {
      append_shortest(out, f);
      out += ' ';
    }
    out += std::to_string(rgb[0]) + ' ' + std::to_string(rgb[1]) + ' ' + std::to_string(rgb[2]) + '\n';
  }
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const auto face = mesh.face(f);
    if (face.size() > 255) throw std::invalid_argument("face with more than 255 corners");
    if (binary) {
      append_le(out, static_cast<std::uint8_t>(face.size()));
      for (std::size_t i : face) append_le(out, static_cast<std::int32_t>(i));
      continue;
    }
    out += std::to_string(face.size());
    for (std::size_t i : face) {
      out += ' ';
      out += std::to_string(i);
    }
    out += '\n';
  }
  return out;
}

std::string write_mesh_ply(const Mesh& mesh) {
  std::string out;
  out += "ply\nformat ascii 1.0\n";
  out += "element vertex " + std::to_string(mesh.num_vertices()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "element face " + std::to_string(mesh.num_faces()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  for (const auto& p : mesh.vertices()) {
    append_shortest(out, p.x());
    out += ' ';
    append_shortest(out, p.y());
    out += ' ';
    append_shortest(out, p.z());
    out += '\n';
  }
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const auto face = mesh.face(f);
    out += std::to_string(face.size());
    for (std::size_t i : face) out += ' ' + std::to_string(i);
    out += '\n';
  }
  return out;
}

std::string write_csv_report(std::span<const NamedReport> reports, std::span<const std::string> comments) {
  std::string out;
  append_comments(out, comments);
  out += "name,method,h_min,h_max,h_avg,k_min,k_max,k_avg,n_failed\n";
  for (const auto& r : reports) {
    out += r.name + ',' + r.method;
    for (double v : {r.report.h_min, r.report.h_max, r.report.h_avg, r.report.k_min, r.report.k_max,
                     r.report.k_avg}) {
      out += ',';
      append_precision(out, v, 6);
    }
    out += ',' + std::to_string(r.report.n_failed) + '\n';
  }
  return out;
}

EstimateSummary summarize(std::span<const CurvatureResult> results) {
  EstimateSummary s;
  s.h_min = s.k_min = std::numeric_limits<double>::infinity();
  s.h_max = s.k_max = -std::numeric_limits<double>::infinity();
  double h_sum = 0.0, k_sum = 0.0;
  std::size_t used = 0;
  for (const auto& r : results) {
    if (r.failed() || !std::isfinite(r.mean) || !std::isfinite(r.gaussian)) {
      ++s.n_failed;
      continue;
    }
    s.h_min = std::min(s.h_min, r.mean);
    s.h_max = std::max(s.h_max, r.mean);
    s.k_min = std::min(s.k_min, r.gaussian);
    s.k_max = std::max(s.k_max, r.gaussian);
    h_sum += r.mean;
    k_sum += r.gaussian;
    ++used;
  }
  if (used == 0) {
    s.h_min = s.h_max = s.h_mean = s.k_min = s.k_max = s.k_mean = CurvatureResult::kNaN;
    return s;
  }
  s.h_mean = h_sum / static_cast<double>(used);
  s.k_mean = k_sum / static_cast<double>(used);
  return s;
}

std::string write_summary_csv(std::string_view name, std::string_view method, const EstimateSummary& summary,
                              std::span<const std::string> comments) {
  std::string out;
  append_comments(out, comments);
  out += "name,method,h_min,h_max,h_mean,k_min,k_max,k_mean,n_failed\n";
  out += std::string(name) + ',' + std::string(method);
  for (double v : {summary.h_min, summary.h_max, summary.h_mean, summary.k_min, summary.k_max, summary.k_mean}) {
    out += ',';
    append_precision(out, v, 6);
  }
  out += ',' + std::to_string(summary.n_failed) + '\n';
  return out;
}

std::string write_ground_truth_csv(const GroundTruth& truth) {
  std::string out = "vertex,theta,phi,mean,gaussian\n";
  for (std::size_t v = 0; v < truth.size(); ++v) {
    out += std::to_string(v);
    for (double x : {truth.theta[v], truth.phi[v], truth.mean[v], truth.gaussian[v]}) {
      out += ',';
      append_precision(out, x, 17);
    }
    out += '\n';
  }
  return out;
}

std::string write_quadric_dump(std::span<const AqfcDetail> details) {
  std::string out = "# vertex_index a11 a22 a33 a12 a13 a23 a14 a24 a34 a44 flags\n";
  for (std::size_t v = 0; v < details.size(); ++v) {
    out += std::to_string(v);
    for (int i = 0; i < 10; ++i) {
      out += ' ';
      append_shortest(out, details[v].world_quadric ? details[v].world_quadric->coeffs[i] : CurvatureResult::kNaN);
    }
    out += ' ';
    out += flag_names(details[v].result.flags);
    out += '\n';
  }
  return out;
}

}  // namespace aqfc::io
