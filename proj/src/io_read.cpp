// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "aqfc/errors.hpp"
#include "aqfc/io.hpp"

namespace aqfc::io {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

std::size_t resolve_obj_index(std::string_view token, std::size_t count, std::size_t line_no) {
  long long idx = 0;
  if (!parse_number(token, idx) || idx == 0) {
    throw ParseError("line " + std::to_string(line_no) + ": bad index '" + std::string(token) + "'");
  }
  const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(count) + idx;
  if (resolved < 0 || resolved >= static_cast<long long>(count)) {
    throw StructuralError("line " + std::to_string(line_no) + ": index " + std::string(token) +
                          " out of range (" + std::to_string(count) + " defined)");
  }
  return static_cast<std::size_t>(resolved);
}

}  // namespace

MeshData read_obj(std::string_view text) {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<std::vector<std::size_t>> faces;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> vertex_normal;  // vn index per vertex
  bool normals_consistent = true;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    const auto bad = [&](const char* what) {
      return ParseError("line " + std::to_string(line_no) + ": " + what);
    };
    if (tok[0] == "v" || tok[0] == "vn") {
      if (tok.size() < 4) throw bad("expected three coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k)
        if (!parse_number(tok[k + 1], p[k])) throw bad("malformed coordinate");
      if (tok[0] == "v") {
        positions.push_back(p);
      } else {
        normals.push_back(p);
      }
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw bad("face needs at least three corners");
      vertex_normal.resize(positions.size(), kNone);
      std::vector<std::size_t> face;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const std::string_view corner = tok[k];
        const std::size_t s1 = corner.find('/');
        const std::size_t v = resolve_obj_index(corner.substr(0, s1), positions.size(), line_no);
        face.push_back(v);
        std::size_t n = kNone;
        if (s1 != std::string_view::npos) {
          const std::size_t s2 = corner.find('/', s1 + 1);
          if (s2 != std::string_view::npos && s2 + 1 < corner.size()) {
            n = resolve_obj_index(corner.substr(s2 + 1), normals.size(), line_no);
          }
        }
        if (n == kNone) {
          normals_consistent = false;
        } else if (vertex_normal[v] == kNone) {
          vertex_normal[v] = n;
        } else if (vertex_normal[v] != n && normals[vertex_normal[v]] != normals[n]) {
          normals_consistent = false;
        }
      }
      faces.push_back(std::move(face));
    }
    // vt, o, g, s, usemtl, mtllib, l ... carry nothing we use
  }

  MeshData out;
  if (normals_consistent && !normals.empty()) {
    vertex_normal.resize(positions.size(), kNone);
    std::vector<Vec3> per_vertex;
    per_vertex.reserve(positions.size());
    for (std::size_t v = 0; v < positions.size() && normals_consistent; ++v) {
      if (vertex_normal[v] == kNone || !(normals[vertex_normal[v]].norm() > 0.0)) {
        normals_consistent = false;
        break;
      }
      per_vertex.push_back(normals[vertex_normal[v]].normalized());
    }
    if (normals_consistent) out.normals = std::move(per_vertex);
  }
  out.mesh = Mesh(std::move(positions), faces);
  return out;
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

namespace {

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

PlyType parse_ply_type(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::kInt8;
  if (s == "uchar" || s == "uint8") return PlyType::kUInt8;
  if (s == "short" || s == "int16") return PlyType::kInt16;
  if (s == "ushort" || s == "uint16") return PlyType::kUInt16;
  if (s == "int" || s == "int32") return PlyType::kInt32;
  if (s == "uint" || s == "uint32") return PlyType::kUInt32;
  if (s == "float" || s == "float32") return PlyType::kFloat32;
  if (s == "double" || s == "float64") return PlyType::kFloat64;
  throw ParseError("unknown PLY property type '" + std::string(s) + "'");
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Sequential reader over the body, ascii or binary.
class PlyBody {
 public:
  PlyBody(std::string_view data, std::size_t base, bool binary) : data_(data), base_(base), binary_(binary) {}

  double read(PlyType t) {
    return binary_ ? read_binary(t) : read_ascii(t);
  }

 private:
  [[noreturn]] void truncated() const {
    throw ParseError("PLY payload truncated at byte offset " + std::to_string(base_ + pos_));
  }

  double read_ascii(PlyType t) {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (pos_ >= data_.size()) truncated();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    const std::string_view tok = data_.substr(start, pos_ - start);
    if (tok == "nan" || tok == "-nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    bool ok = false;
    if (t == PlyType::kFloat32) {
      float f = 0.0f;
      ok = parse_number(tok, f);
      v = f;
    } else {
      ok = parse_number(tok, v);
    }
    if (!ok) {
      throw ParseError("malformed PLY value '" + std::string(tok) + "' at byte offset " +
                       std::to_string(base_ + start));
    }
    return v;
  }

  template <typename T>
  T take() {
    if (data_.size() - pos_ < sizeof(T)) truncated();
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;  // host is little-endian
  }

  double read_binary(PlyType t) {
    switch (t) {
      case PlyType::kInt8: return take<std::int8_t>();
      case PlyType::kUInt8: return take<std::uint8_t>();
      case PlyType::kInt16: return take<std::int16_t>();
      case PlyType::kUInt16: return take<std::uint16_t>();
      case PlyType::kInt32: return take<std::int32_t>();
      case PlyType::kUInt32: return take<std::uint32_t>();
      case PlyType::kFloat32: return take<float>();
      case PlyType::kFloat64: return take<double>();
    }
    return 0.0;
  }

  std::string_view data_;
  std::size_t base_;
  bool binary_;
  std::size_t pos_ = 0;
};

}  // namespace

MeshData read_ply(std::string_view bytes) {
  std::size_t pos = 0;
  const auto next_line = [&]() -> std::string_view {
    if (pos >= bytes.size()) throw ParseError("PLY header not terminated by end_header");
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  if (next_line() != "ply") throw ParseError("missing 'ply' magic line");
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string_view line = next_line();
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError("malformed format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else {
        throw UnsupportedFormatError("unsupported PLY format '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() < 3) throw ParseError("malformed element line");
      PlyElement e;
      e.name = tok[1];
      if (!parse_number(tok[2], e.count)) throw ParseError("malformed element count");
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before any element");
      PlyProperty p;
      if (tok.size() >= 5 && tok[1] == "list") {
        p.is_list = true;
        p.count_type = parse_ply_type(tok[2]);
        p.type = parse_ply_type(tok[3]);
        p.name = tok[4];
      } else if (tok.size() >= 3) {
        p.type = parse_ply_type(tok[1]);
        p.name = tok[2];
      } else {
        throw ParseError("malformed property line");
      }
      elements.back().properties.push_back(std::move(p));
    } else {
      throw ParseError("unexpected PLY header line '" + std::string(line) + "'");
    }
  }
  if (!have_format) throw ParseError("PLY header lacks a format line");

  PlyBody body(bytes.substr(pos), pos, binary);
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  bool has_normals = false;
  std::vector<std::vector<std::size_t>> faces;

  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int slot[6] = {-1, -1, -1, -1, -1, -1};
    if (is_vertex) {
      static constexpr const char* kNames[6] = {"x", "y", "z", "nx", "ny", "nz"};
      for (std::size_t i = 0; i < e.properties.size(); ++i)
        for (int k = 0; k < 6; ++k)
          if (e.properties[i].name == kNames[k] && !e.properties[i].is_list) slot[k] = static_cast<int>(i);
      if (slot[0] < 0 || slot[1] < 0 || slot[2] < 0) throw ParseError("vertex element lacks x, y or z");
      has_normals = slot[3] >= 0 && slot[4] >= 0 && slot[5] >= 0;
      positions.reserve(e.count);
    }
    std::vector<double> values(e.properties.size());
    for (std::size_t n = 0; n < e.count; ++n) {
      std::vector<std::size_t> face;
      for (std::size_t i = 0; i < e.properties.size(); ++i) {
        const auto& p = e.properties[i];
        if (!p.is_list) {
          values[i] = body.read(p.type);
          continue;
        }
        const double count = body.read(p.count_type);
        if (!(count >= 0.0)) throw ParseError("negative list length in element " + e.name);
        const bool indices = is_face && (p.name == "vertex_indices" || p.name == "vertex_index");
        for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
          const double v = body.read(p.type);
          if (indices) {
            if (!(v >= 0.0)) throw StructuralError("face " + std::to_string(n) + " has a negative index");
            face.push_back(static_cast<std::size_t>(v));
          }
        }
      }
      if (is_vertex) {
        positions.emplace_back(values[slot[0]], values[slot[1]], values[slot[2]]);
        if (has_normals) normals.emplace_back(values[slot[3]], values[slot[4]], values[slot[5]]);
      } else if (is_face) {
        faces.push_back(std::move(face));
      }
    }
  }

  MeshData out;
  if (has_normals) {
    bool ok = true;
    for (auto& n : normals) {
      if (!(n.norm() > 0.0)) {
        ok = false;
        break;
      }
      n.normalize();
    }
    if (ok) out.normals = std::move(normals);
  }
  out.mesh = Mesh(std::move(positions), faces);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

MeshData read_mesh_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  const std::string data = read_file(path);
  if (ext == ".obj") return read_obj(data);
  if (ext == ".ply") return read_ply(data);
  throw UnsupportedFormatError("unsupported mesh file extension '" + ext + "'");
}

}  // namespace aqfc::io
