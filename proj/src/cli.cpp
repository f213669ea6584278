// SPDX-License-Identifier: Apache-2.0
#include "aqfc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "aqfc/benchmark.hpp"
#include "aqfc/curvature.hpp"
#include "aqfc/errors.hpp"
#include "aqfc/io.hpp"

namespace aqfc::cli {

namespace fs = std::filesystem;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned default_threads() {
  if (const char* env = std::getenv("AQFC_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end == '\0' && n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string_view method_name(Method m) { return m == Method::kAqfc ? "aqfc" : "ddgo"; }

struct CommonOptions {
  std::size_t m = kDefaultNeighborhoodSize;
  unsigned threads = 0;  // 0: environment / hardware default
  std::string field = "mean";
  bool binary = false;

  unsigned thread_count() const { return threads == 0 ? default_threads() : threads; }
  io::PlyEncoding encoding() const { return binary ? io::PlyEncoding::kBinaryLittleEndian : io::PlyEncoding::kAscii; }
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--m", o.m, "Minimum neighbourhood size")
      ->check(CLI::Range(kMinNeighborhoodSize, std::size_t{1} << 20));
  app->add_option("--threads", o.threads, "Worker threads (default: $AQFC_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app->add_option("--field", o.field, "Scalar written to PLY quality")
      ->check(CLI::IsMember({"mean", "gaussian", "curvedness", "shape_index"}));
  app->add_flag("--binary", o.binary, "Write binary little-endian PLY");
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateOptions {
  CommonOptions common;
  std::string method = "aqfc";
  std::string input;
  std::string output;
  std::string csv;
  std::string dump;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out, std::ostream& err) {
  io::MeshData data;
  try {
    if (!fs::exists(o.input)) throw InputError("input file not found: " + o.input);
    data = io::read_mesh_file(o.input);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(o.input + ": " + e.what());
  }
  const Mesh& mesh = data.mesh;
  const Method method = o.method == "ddgo" ? Method::kDdgo : Method::kAqfc;
  const unsigned threads = o.common.thread_count();
  const auto field = io::parse_scalar_field(o.common.field);

  std::vector<Vec3> normals;
  if (data.normals) {
    normals = std::move(*data.normals);
  } else if (method == Method::kAqfc) {
    auto field_normals = try_vertex_normals(mesh);
    if (!field_normals.failed.empty()) {
      err << "warning: " << field_normals.failed.size() << " vertices have no usable normal\n";
    }
    normals = std::move(field_normals.normals);
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<CurvatureResult> results;
  std::vector<AqfcDetail> details;
  AqfcParams params;
  params.m = o.common.m;
  if (method == Method::kAqfc && !o.dump.empty()) {
    details = aqfc_estimate_all_detailed(mesh, normals, params, threads);
    results.reserve(details.size());
    for (const auto& d : details) results.push_back(d.result);
  } else {
    results = estimate_all(mesh, normals, method, params, threads);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto summary = io::summarize(results);
  const auto colormap = io::default_colormap(field, results);
  if (!o.output.empty()) io::write_file(o.output, io::write_ply(mesh, results, field, colormap, o.common.encoding()));
  if (!o.csv.empty()) {
    const std::vector<std::string> comments{
        "aqfc estimate", "method=" + o.method, "m=" + std::to_string(o.common.m), "field=" + o.common.field,
        "vertices=" + std::to_string(mesh.num_vertices()),
        std::string("normals=") + (data.normals ? "embedded" : "mesh-average")};
    io::write_file(o.csv, io::write_summary_csv(fs::path(o.input).stem().string(), o.method, summary, comments));
  }
  if (!o.dump.empty()) io::write_file(o.dump, io::write_quadric_dump(details));

  if (summary.n_failed > 0) err << "warning: " << summary.n_failed << " vertices failed\n";
  out << o.method << ": " << mesh.num_vertices() << " vertices, " << summary.n_failed << " failed, "
      << seconds << " s\n";
  out << "  H in [" << summary.h_min << ", " << summary.h_max << "], mean " << summary.h_mean << "\n";
  out << "  K in [" << summary.k_min << ", " << summary.k_max << "], mean " << summary.k_mean << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  CommonOptions common;
  std::string out_dir = ".";
  std::vector<std::size_t> levels{400, 3600, 10000};
  std::size_t n = 10000;
  std::uint64_t seed = 1;
};

struct BenchCase {
  std::string name;
  SampledSurface surface;
};

void run_bench(const std::string& bench, const std::vector<BenchCase>& cases, const BenchOptions& o,
               std::vector<std::string> comments, std::ostream& out) {
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const auto field = io::parse_scalar_field(o.common.field);
  const unsigned threads = o.common.thread_count();
  AqfcParams params;
  params.m = o.common.m;

  std::vector<io::NamedReport> reports;
  for (const auto& c : cases) {
    const Mesh& mesh = c.surface.mesh;
    io::write_file(dir / (c.name + ".mesh.ply"), io::write_mesh_ply(mesh));
    io::write_file(dir / (c.name + ".truth.csv"), io::write_ground_truth_csv(c.surface.truth));
    auto normal_field = try_vertex_normals(mesh);
    for (Method method : {Method::kAqfc, Method::kDdgo}) {
      const auto results = estimate_all(mesh, normal_field.normals, method, params, threads);
      const auto report = error_report(results, c.surface.truth);
      const std::string mname(method_name(method));
      reports.push_back({c.name, mname, report});
      const auto colormap = io::default_colormap(field, results, &c.surface.truth);
      io::write_file(dir / (c.name + "." + mname + ".ply"),
                     io::write_ply(mesh, results, field, colormap, o.common.encoding()));
      out << c.name << " " << mname << ": h_avg " << report.h_avg << ", k_avg " << report.k_avg << ", failed "
          << report.n_failed << "\n";
    }
  }
  comments.insert(comments.begin(), "aqfc bench " + bench);
  comments.push_back("m=" + std::to_string(o.common.m));
  comments.push_back("field=" + o.common.field);
  comments.push_back("normals=mesh-average");
  comments.push_back("truth=outward normals, convex H negative");
  io::write_file(dir / (bench + ".csv"), io::write_csv_report(reports, comments));
}

std::size_t exact_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : 0;
}

int cmd_torus_regular(const BenchOptions& o, std::ostream& out) {
  std::vector<BenchCase> cases;
  std::string levels;
  for (std::size_t level : o.levels) {
    const std::size_t side = exact_sqrt(level);
    if (side < 3) throw InputError("torus level " + std::to_string(level) + " is not a square >= 9");
    cases.push_back({"torus-regular-" + std::to_string(level), sample_torus_regular(side, side)});
    levels += (levels.empty() ? "" : ",") + std::to_string(level);
  }
  run_bench("torus-regular", cases, o, {"levels=" + levels}, out);
  return kExitOk;
}

int cmd_torus_irregular(const BenchOptions& o, std::ostream& out) {
  if (o.n < 100) throw InputError("--n must be at least 100");
  std::vector<BenchCase> cases;
  cases.push_back({"torus-irregular-" + std::to_string(o.n) + "-s" + std::to_string(o.seed),
                   sample_torus_irregular(o.n, o.seed)});
  run_bench("torus-irregular", cases, o, {"n=" + std::to_string(o.n), "seed=" + std::to_string(o.seed)}, out);
  return kExitOk;
}

int cmd_sphere_irregular(const BenchOptions& o, std::ostream& out) {
  std::vector<BenchCase> cases;
  auto surface = sample_sphere_irregular(30, 17, o.seed);
  cases.push_back({"sphere-irregular-" + std::to_string(surface.mesh.num_vertices()) + "-s" + std::to_string(o.seed),
                   std::move(surface)});
  run_bench("sphere-irregular", cases, o, {"grid=30x17", "seed=" + std::to_string(o.seed)}, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature estimation by algebraic quadric fitting", "aqfc"};
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate per-vertex curvature of an OBJ/PLY mesh");
  add_common(estimate, est.common);
  estimate->add_option("--method", est.method, "Estimator")->check(CLI::IsMember({"aqfc", "ddgo"}));
  estimate->add_option("input", est.input, "Input mesh (.obj or .ply)")->required();
  estimate->add_option("--out,-o", est.output, "Coloured PLY output");
  estimate->add_option("--csv", est.csv, "Summary CSV output");
  estimate->add_option("--dump-quadrics", est.dump, "Per-vertex fitted quadrics (aqfc only)");

  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Benchmark against analytic ground truth");
  bench->require_subcommand(1);
  auto* torus_regular = bench->add_subcommand("torus-regular", "Regular quad tori");
  auto* torus_irregular = bench->add_subcommand("torus-irregular", "Randomly sampled Delaunay torus");
  auto* sphere_irregular = bench->add_subcommand("sphere-irregular", "Latitude/longitude sphere, random diagonals");
  for (auto* sub : {torus_regular, torus_irregular, sphere_irregular}) {
    add_common(sub, bo.common);
    sub->add_option("--out-dir", bo.out_dir, "Directory for CSV, meshes and ground truth");
  }
  torus_regular->add_option("--levels", bo.levels, "Vertex counts (perfect squares)")->delimiter(',');
  torus_irregular->add_option("--n", bo.n, "Vertex count");
  torus_irregular->add_option("--seed", bo.seed, "Sampling seed");
  sphere_irregular->add_option("--seed", bo.seed, "Diagonal seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(est, out, err);
    if (torus_regular->parsed()) return cmd_torus_regular(bo, out);
    if (torus_irregular->parsed()) return cmd_torus_irregular(bo, out);
    if (sphere_irregular->parsed()) return cmd_sphere_irregular(bo, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace aqfc::cli
