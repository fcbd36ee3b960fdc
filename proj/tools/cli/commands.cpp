// Copyright 2026 The kdcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "kdcs/colormap.hpp"
#include "kdcs/dataset_io.hpp"
#include "kdcs/denoise.hpp"
#include "kdcs/error.hpp"
#include "kdcs/ingest.hpp"
#include "kdcs/kde.hpp"
#include "kdcs/ordering.hpp"
#include "kdcs/pipeline.hpp"
#include "kdcs/random.hpp"
#include "kdcs/raster_io.hpp"
#include "service/service.hpp"

namespace kdcs::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Thrown for flag combinations CLI11 cannot express; maps to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t parse_mask(const std::string& text) {
  std::string digits = text;
  int base = 10;
  if (digits.rfind("0b", 0) == 0 || digits.rfind("0B", 0) == 0) {
    base = 2;
    digits = digits.substr(2);
  } else if (digits.rfind("0x", 0) == 0 || digits.rfind("0X", 0) == 0) {
    base = 16;
    digits = digits.substr(2);
  }
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(digits, &used, base);
  } catch (const std::exception&) {
    used = 0;
  }
  if (digits.empty() || used != digits.size()) throw UsageError("invalid mask '" + text + "'");
  return v;
}

RegionSelection parse_region(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("region must look like rect:x0,y0,x1,y1 or disc:cx,cy,r");
  const std::string shape = text.substr(0, colon);
  std::vector<double> v;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("invalid region coordinate '" + item + "'");
    }
  }
  try {
    if (shape == "rect" && v.size() == 4) return RegionSelection::rectangle(v[0], v[1], v[2], v[3]);
    if (shape == "disc" && v.size() == 3) return RegionSelection::disc(v[0], v[1], v[2]);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("region must look like rect:x0,y0,x1,y1 or disc:cx,cy,r");
}

void write_json(const std::string& path, const json& doc) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << doc.dump(2) << '\n';
}

struct SizeFlags {
  std::size_t k = 0;
  double eps = 0.0;
  double delta = 0.1;
  double c_coreset = 1.0;

  void add(CLI::App* cmd) {
    auto* k_opt = cmd->add_option("-k,--k", k, "Coreset size (prefix length)");
    auto* eps_opt = cmd->add_option("--eps", eps, "Error target; k = coreset_size_for_eps");
    k_opt->excludes(eps_opt);
    cmd->add_option("--delta", delta, "Failure probability for --eps")->capture_default_str();
    cmd->add_option("--c-coreset", c_coreset, "Constant of the coreset size bound")->capture_default_str();
  }

  // Resolves k against a dataset of n points; 0 means "all".
  std::size_t resolve(std::size_t n, std::ostream& out) const {
    std::size_t chosen = k;
    if (eps > 0.0) {
      chosen = coreset_size_for_eps({eps, delta, c_coreset, 1.0});
      out << "k_from_eps=" << chosen << '\n';
    }
    if (chosen == 0) chosen = n;
    if (chosen > n) throw DomainError("k=" + std::to_string(chosen) + " exceeds dataset size " + std::to_string(n));
    return chosen;
  }
};

struct GridFlags {
  double sigma = kDefaultBandwidth;
  int width = kDefaultGridSize;
  int height = kDefaultGridSize;

  void add(CLI::App* cmd, int default_size) {
    width = height = default_size;
    cmd->add_option("--sigma", sigma, "Kernel bandwidth in normalized units")->capture_default_str();
    cmd->add_option("--width", width, "Raster width in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--height", height, "Raster height in pixels")->capture_default_str()->check(CLI::PositiveNumber);
  }
  GridSpec grid() const { return {width, height, {}}; }
  KernelParams kernel() const { return {sigma}; }
};

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  int depth = kDefaultSynthDepth;
  double scale = -1.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  double scale = a.scale;
  if (a.count > 0) scale = calibrate_synth_scale(a.depth, a.count);
  if (scale < 0.0) scale = calibrate_synth_scale(a.depth, kDefaultSynthCount);
  const PointSet set = synth_generate(a.depth, scale, a.seed);
  save_points(set.points, a.out);
  out << "count=" << set.size() << "\ndepth=" << a.depth << "\nscale=" << fmt(scale) << "\nseed=" << a.seed << '\n';
  return kExitOk;
}

// ---- order ----------------------------------------------------------------

struct OrderArgs {
  std::string input;
  std::string output;
  std::string format = "whitespace";
  bool swap = false;
  std::string method = "bit_reversal";
  std::uint64_t seed = 1;
  std::string mask;
  int bits = kDefaultBitsPerAxis;
  std::string text;
};

int cmd_order(const OrderArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const TextFormat format = a.format == "csv" ? TextFormat::csv : TextFormat::whitespace;
  const LoadResult loaded = load_points(a.input, format, a.swap);
  const auto loaded_ms = elapsed_ms(start);
  std::optional<std::uint64_t> mask;
  if (!a.mask.empty()) mask = parse_mask(a.mask);
  const PriorityDataset ds = prioritize(loaded.set, parse_ordering_method(a.method), a.seed, mask, a.bits);
  save_priority_dataset(ds, a.output);
  if (!a.text.empty()) export_priority_text(ds, a.text);
  out << "source_count=" << ds.points.size() << "\npadded_count=" << ds.padded_count << "\nmask=" << ds.mask
      << "\nmethod=" << to_string(ds.method) << "\nseed=" << ds.seed << "\nbits_per_axis=" << ds.bits_per_axis
      << "\nskipped_lines=" << loaded.skipped_lines << "\nload_ms=" << fmt(loaded_ms)
      << "\ntotal_ms=" << fmt(elapsed_ms(start)) << '\n';
  return kExitOk;
}

// ---- extract --------------------------------------------------------------

struct ExtractArgs {
  std::string input;
  std::string output;
  SizeFlags size;
};

int cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const PriorityDataset ds = load_priority_dataset(a.input);
  const std::size_t k = a.size.resolve(ds.points.size(), out);
  save_points(std::span<const Point>(ds.points.points).first(k), a.output);
  out << "k=" << k << '\n';
  return kExitOk;
}

// ---- raster ---------------------------------------------------------------

struct RasterArgs {
  std::string input;
  std::string out;
  SizeFlags size;
  GridFlags grid;
  std::string colormap = "density";
  double floor = kDefaultFloorFraction;
  std::string reference = "full";
  bool no_png = false;
};

int cmd_raster(const RasterArgs& a, std::ostream& out) {
  const PriorityDataset ds = load_priority_dataset(a.input);
  const std::size_t k = a.size.resolve(ds.points.size(), out);
  const auto colormap = Colormap::by_name(a.colormap);
  const auto pts = prefix_points(ds, k);
  const DensityRaster raster = kde_raster(pts, a.grid.grid(), a.grid.kernel());
  double ref = raster.max_value();
  if (a.reference == "full" && k < ds.points.size()) {
    ref = kde_raster(prefix_points(ds, ds.points.size()), a.grid.grid(), a.grid.kernel()).max_value();
  }
  write_raster(raster, a.out);
  if (!a.no_png) write_png(transfer_map(raster, colormap, a.floor, ref), a.out + ".png");
  out << "k=" << k << "\nwidth=" << raster.grid.width << "\nheight=" << raster.grid.height
      << "\nmax=" << fmt(raster.max_value()) << "\nreference_max=" << fmt(ref) << '\n';
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string input;
  std::vector<std::size_t> sizes{830, 1890, 5000, 10000};
  int trials = 10;
  GridFlags grid;
  std::uint64_t seed = 1;
  std::string method = "bit_reversal";
  std::string out;
  std::string json_path;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const PriorityDataset ds = load_priority_dataset(a.input);
  CompareOptions opt;
  opt.sizes = a.sizes;
  opt.trials = a.trials;
  opt.kernel = a.grid.kernel();
  opt.grid = a.grid.grid();
  opt.seed = a.seed;
  opt.method = parse_ordering_method(a.method);
  opt.bits_per_axis = static_cast<int>(ds.bits_per_axis);
  const auto rows = compare_coreset_vs_rs(ds.points, opt);

  std::ostringstream table;
  table << std::left << std::setw(10) << "Size" << std::setw(14) << "RS Err" << "Coreset Err\n";
  json doc;
  doc["trials"] = a.trials;
  doc["sigma"] = a.grid.sigma;
  doc["width"] = a.grid.width;
  doc["height"] = a.grid.height;
  doc["seed"] = a.seed;
  doc["rows"] = json::array();
  std::ostringstream kv;
  for (const auto& r : rows) {
    table << std::setw(10) << r.size << std::setw(14) << std::setprecision(4) << r.rs_error << std::setprecision(4)
          << r.coreset_error << '\n';
    kv << "size=" << r.size << " rs_err=" << fmt(r.rs_error) << " coreset_err=" << fmt(r.coreset_error) << '\n';
    doc["rows"].push_back({{"size", r.size},
                           {"rs_err", r.rs_error},
                           {"coreset_err", r.coreset_error},
                           {"rs_trials", r.rs_trials},
                           {"coreset_trials", r.coreset_trials}});
  }
  out << table.str() << kv.str();
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw Error("cannot write " + a.out);
    f << kv.str();
  }
  write_json(a.json_path, doc);
  return kExitOk;
}

// ---- denoise --------------------------------------------------------------

struct DenoiseArgs {
  std::string input;
  std::string raster;
  SizeFlags size;
  GridFlags grid;
  double percentage = -1.0;
  double radius = 0.0;
  std::string region;
  double reference_max = 0.0;
  std::string out;
  std::string colormap = "density";
  double floor = kDefaultFloorFraction;
  std::string json_path;
};

int cmd_denoise(const DenoiseArgs& a, std::ostream& out, std::ostream& err) {
  if (a.input.empty() == a.raster.empty()) throw UsageError("give exactly one of --input or --raster");
  if (a.region.empty() && a.percentage <= 0.0) throw UsageError("give --percentage (and --radius) or --region");
  DensityRaster raster;
  double ref = a.reference_max;
  if (!a.raster.empty()) {
    raster = read_raster(a.raster);
    if (ref <= 0.0) ref = raster.max_value();
  } else {
    const PriorityDataset ds = load_priority_dataset(a.input);
    const std::size_t k = a.size.resolve(ds.points.size(), out);
    raster = kde_raster(prefix_points(ds, k), a.grid.grid(), a.grid.kernel());
    if (ref <= 0.0) ref = kde_raster(prefix_points(ds, ds.points.size()), a.grid.grid(), a.grid.kernel()).max_value();
  }

  DenoiseParams params{a.percentage, a.radius};
  json doc;
  if (!a.region.empty()) {
    const auto suggestion = suggest_params(raster, parse_region(a.region), ref);
    params = suggestion.params;
    doc["suggested"] = true;
  }
  const DenoiseMask mask = denoise_mask(raster, params, ref);
  const DensityRaster cleaned = apply_denoise(raster, mask);
  const std::size_t kept = mask.kept_count();
  if (kept == 0) err << "warning: every pixel suppressed; output is blank\n";
  if (!a.out.empty()) {
    write_raster(cleaned, a.out);
    write_png(transfer_map(cleaned, Colormap::by_name(a.colormap), a.floor, ref), a.out + ".png");
  }
  out << "percentage=" << fmt(params.percentage) << "\nradius=" << fmt(params.radius)
      << "\nthreshold=" << fmt(params.percentage * ref) << "\nreference_max=" << fmt(ref) << "\nkept=" << kept
      << "\nsuppressed=" << mask.kept.size() - kept << '\n';
  doc["percentage"] = params.percentage;
  doc["radius"] = params.radius;
  doc["threshold"] = params.percentage * ref;
  doc["reference_max"] = ref;
  doc["kept"] = kept;
  doc["suppressed"] = mask.kept.size() - kept;
  write_json(a.json_path, doc);
  return kExitOk;
}

// ---- calibrate ------------------------------------------------------------

struct CalibrateArgs {
  std::string input;
  double eps = 0.01;
  double delta = 0.1;
  int trials = 20;
  GridFlags grid;
  std::uint64_t seed = 1;
  std::string method = "bit_reversal";
  std::string out;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const PriorityDataset ds = load_priority_dataset(a.input);
  CalibrationOptions opt;
  opt.spec = {a.eps, a.delta};
  opt.trials = a.trials;
  opt.kernel = a.grid.kernel();
  opt.grid = a.grid.grid();
  opt.seed = a.seed;
  opt.method = parse_ordering_method(a.method);
  const auto cs = calibrate_size_constant(ds.points, SampleKind::coreset, opt);
  const auto rs = calibrate_size_constant(ds.points, SampleKind::random_sample, opt);
  out << "c_coreset=" << fmt(cs.constant) << "\ncoreset_size=" << cs.size << "\ncoreset_success=" << fmt(cs.success_rate)
      << "\nc_rs=" << fmt(rs.constant) << "\nrs_size=" << rs.size << "\nrs_success=" << fmt(rs.success_rate) << '\n';
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw Error("cannot write " + a.out);
    f << "# eps=" << fmt(a.eps) << " delta=" << fmt(a.delta) << " c_rs=" << fmt(rs.constant) << '\n';
    for (const char* section : {"extract", "raster", "denoise"}) {
      f << '[' << section << "]\nc-coreset=" << fmt(cs.constant) << '\n';
    }
  }
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::size_t points = 1000000;
  std::uint64_t seed = 1;
  std::string method = "bit_reversal";
  int sigma_grid = 256;
  std::size_t k = 5000;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  Rng rng(a.seed);
  std::vector<Point> pts(a.points);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  auto t = Clock::now();
  const PointSet set = PointSet::from_points(std::move(pts));
  const auto normalized = set.normalized();
  out << "normalize_ms=" << fmt(elapsed_ms(t)) << '\n';
  t = Clock::now();
  const auto zorder = zorder_sort(normalized);
  out << "zorder_sort_ms=" << fmt(elapsed_ms(t)) << '\n';
  t = Clock::now();
  const auto ordering = make_priority_ordering(set.size(), parse_ordering_method(a.method), a.seed);
  out << "reorder_ms=" << fmt(elapsed_ms(t)) << '\n';
  const auto source = compose_with_zorder(ordering, zorder);
  const std::size_t k = std::min(a.k, set.size());
  t = Clock::now();
  const auto raster = kde_raster(gather(normalized, std::span<const std::size_t>(source).first(k)),
                                 GridSpec{a.sigma_grid, a.sigma_grid, {}}, KernelParams{});
  out << "raster_ms=" << fmt(elapsed_ms(t)) << "\nraster_max=" << fmt(raster.max_value()) << '\n';
  return kExitOk;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_pixels = std::size_t{2048} * 2048;
  std::size_t cache = 64;
  std::string cors_origin = "*";
  std::vector<std::string> datasets;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  service::Service svc({a.max_pixels, a.cache, a.cors_origin});
  for (const auto& path : a.datasets) {
    const auto e = svc.register_path(path);
    out << "registered " << e->id << ' ' << path << " count=" << e->dataset.points.size() << '\n';
  }
  out.flush();
  return service::run_server(svc, a.host, a.port);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kdcs: coreset priority ordering, KDE rasters and de-noising for large 2-D point sets"};
  app.set_config("--config", "", "key=value (TOML) file supplying defaults; flags win");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate the recursive multi-scale synthetic dataset");
  c_synth->add_option("--depth", synth.depth, "Recursion levels")->capture_default_str()->check(CLI::Range(1, 8));
  auto* scale_opt = c_synth->add_option("--scale", synth.scale, "Replication per unit of rectangle perimeter");
  c_synth->add_option("--count", synth.count, "Calibrate --scale to approximately this many points")->excludes(scale_opt);
  c_synth->add_option("--seed", synth.seed, "Output shuffle seed")->capture_default_str();
  c_synth->add_option("-o,--out", synth.out, "Output text file")->required();

  OrderArgs order;
  auto* c_order = app.add_subcommand("order", "Z-order sort and priority-reorder a point file into KDCS");
  c_order->add_option("-i,--input", order.input, "Point text file")->required()->check(CLI::ExistingFile);
  c_order->add_option("-o,--output", order.output, "KDCS output file")->required();
  c_order->add_option("--format", order.format, "whitespace or csv")->capture_default_str()->check(CLI::IsMember({"whitespace", "csv"}));
  c_order->add_flag("--swap", order.swap, "Input lines are 'y x' (e.g. lat lon)");
  c_order->add_option("--method", order.method, "bit_reversal or tree")->capture_default_str()->check(CLI::IsMember({"bit_reversal", "bitrev", "tree"}));
  c_order->add_option("--seed", order.seed, "Seed for the mask / tree coin flips")->capture_default_str();
  c_order->add_option("--mask", order.mask, "Force the XOR mask (decimal, 0b..., 0x...)");
  c_order->add_option("--bits", order.bits, "Morton bits per axis")->capture_default_str()->check(CLI::Range(1, 31));
  c_order->add_option("--text", order.text, "Also write the priority order as 'x y' text");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Write the first k points of a KDCS file as text");
  c_extract->add_option("-i,--input", extract.input, "KDCS file")->required()->check(CLI::ExistingFile);
  c_extract->add_option("-o,--output", extract.output, "Output text file")->required();
  extract.size.add(c_extract);

  RasterArgs raster;
  auto* c_raster = app.add_subcommand("raster", "Rasterize the KDE of a coreset prefix");
  c_raster->add_option("-i,--input", raster.input, "KDCS file")->required()->check(CLI::ExistingFile);
  c_raster->add_option("-o,--out", raster.out, "Output stem (.f32/.hdr/.png)")->required();
  raster.size.add(c_raster);
  raster.grid.add(c_raster, kDefaultGridSize);
  c_raster->add_option("--colormap", raster.colormap, "Colormap name")->capture_default_str();
  c_raster->add_option("--floor", raster.floor, "Background floor as a fraction of the reference max")->capture_default_str();
  c_raster->add_option("--reference", raster.reference, "full or self")->capture_default_str()->check(CLI::IsMember({"full", "self"}));
  c_raster->add_flag("--no-png", raster.no_png, "Skip PNG output");

  CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "Median L-infinity error of coreset prefixes vs random samples");
  c_compare->add_option("-i,--input", compare.input, "KDCS file")->required()->check(CLI::ExistingFile);
  c_compare->add_option("--sizes", compare.sizes, "Subset sizes")->delimiter(',')->capture_default_str();
  c_compare->add_option("--trials", compare.trials, "Trials per size")->capture_default_str()->check(CLI::PositiveNumber);
  compare.grid.add(c_compare, 256);
  c_compare->add_option("--seed", compare.seed, "Base seed")->capture_default_str();
  c_compare->add_option("--method", compare.method, "bit_reversal or tree")->capture_default_str();
  c_compare->add_option("-o,--out", compare.out, "key=value table output");
  c_compare->add_option("--json", compare.json_path, "JSON table output");

  DenoiseArgs denoise;
  auto* c_denoise = app.add_subcommand("denoise", "Suppress isolated low-density pixels");
  c_denoise->add_option("-i,--input", denoise.input, "KDCS file (with --k)")->check(CLI::ExistingFile);
  c_denoise->add_option("--raster", denoise.raster, "Raster stem written by 'raster'");
  denoise.size.add(c_denoise);
  denoise.grid.add(c_denoise, kDefaultGridSize);
  auto* pct = c_denoise->add_option("--percentage", denoise.percentage, "High-density level as a fraction of the reference max");
  c_denoise->add_option("--radius", denoise.radius, "Witness radius in normalized units")->capture_default_str();
  c_denoise->add_option("--region", denoise.region, "Suggest params for rect:x0,y0,x1,y1 or disc:cx,cy,r")->excludes(pct);
  c_denoise->add_option("--reference-max", denoise.reference_max, "Override the reference maximum");
  c_denoise->add_option("-o,--out", denoise.out, "Output stem (.f32/.hdr/.png)");
  c_denoise->add_option("--colormap", denoise.colormap, "Colormap name")->capture_default_str();
  c_denoise->add_option("--floor", denoise.floor, "Background floor fraction")->capture_default_str();
  c_denoise->add_option("--json", denoise.json_path, "JSON output with the chosen params");

  CalibrateArgs calibrate;
  auto* c_calibrate = app.add_subcommand("calibrate", "Fit the size-bound constants for an error target");
  c_calibrate->add_option("-i,--input", calibrate.input, "KDCS file")->required()->check(CLI::ExistingFile);
  c_calibrate->add_option("--eps", calibrate.eps, "Target L-infinity error")->capture_default_str();
  c_calibrate->add_option("--delta", calibrate.delta, "Allowed failure rate")->capture_default_str();
  c_calibrate->add_option("--trials", calibrate.trials, "Trials per candidate size")->capture_default_str()->check(CLI::PositiveNumber);
  calibrate.grid.add(c_calibrate, 64);
  c_calibrate->add_option("--seed", calibrate.seed, "Base seed")->capture_default_str();
  c_calibrate->add_option("--method", calibrate.method, "bit_reversal or tree")->capture_default_str();
  c_calibrate->add_option("-o,--out", calibrate.out, "Write a --config file carrying c-coreset");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time the ordering pipeline on uniform random points");
  c_bench->add_option("--points", bench.points, "Point count")->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "Seed")->capture_default_str();
  c_bench->add_option("--method", bench.method, "bit_reversal or tree")->capture_default_str();
  c_bench->add_option("--grid", bench.sigma_grid, "Raster side for the prefix KDE")->capture_default_str();
  c_bench->add_option("-k,--k", bench.k, "Prefix size to rasterize")->capture_default_str();

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP service");
  c_serve->add_option("--host", serve.host, "Bind address")->capture_default_str();
  c_serve->add_option("--port", serve.port, "Port")->capture_default_str();
  c_serve->add_option("--max-pixels", serve.max_pixels, "Per-request raster budget")->capture_default_str();
  c_serve->add_option("--cache", serve.cache, "Raster cache entries")->capture_default_str();
  c_serve->add_option("--cors-origin", serve.cors_origin, "Access-Control-Allow-Origin value")->capture_default_str();
  c_serve->add_option("--dataset", serve.datasets, "KDCS files to register at startup");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*c_synth) return cmd_synth(synth, out);
    if (*c_order) return cmd_order(order, out);
    if (*c_extract) return cmd_extract(extract, out);
    if (*c_raster) return cmd_raster(raster, out);
    if (*c_compare) return cmd_compare(compare, out);
    if (*c_denoise) return cmd_denoise(denoise, out, err);
    if (*c_calibrate) return cmd_calibrate(calibrate, out);
    if (*c_bench) return cmd_bench(bench, out);
    if (*c_serve) return cmd_serve(serve, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CannotSuppressError& e) {
    err << "error: " << e.what()
        << "\n(the selected region contains or neighbours the densest pixels; pick a smaller, isolated region)\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace kdcs::cli
