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

#include "service/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "kdcs/error.hpp"
#include "kdcs/ordering.hpp"
#include "kdcs/raster_io.hpp"

namespace kdcs::service {

using nlohmann::json;

namespace {

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::full:
      return "full";
    case Variant::coreset:
      return "coreset";
    case Variant::rs:
      return "rs";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "coreset") return Variant::coreset;
  if (s == "rs") return Variant::rs;
  throw HttpError(400, "variant must be full, coreset or rs");
}

json dataset_json(const DatasetEntry& e) {
  const auto& ds = e.dataset;
  const auto& b = ds.points.bbox;
  return {{"id", e.id},
          {"count", ds.points.size()},
          {"padded_count", ds.padded_count},
          {"bbox", {b.min_x, b.min_y, b.max_x, b.max_y}},
          {"mask", ds.mask},
          {"seed", ds.seed},
          {"method", std::string(to_string(ds.method))},
          {"bits_per_axis", ds.bits_per_axis}};
}

template <class T>
T parse_number(const std::string& text, const char* name) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw HttpError(400, std::string("invalid value for '") + name + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw HttpError(400, std::string("non-finite value for '") + name + "'");
  }
  return value;
}

// Reads a parameter from either the query string or a JSON body.
class Params {
 public:
  explicit Params(const httplib::Request& req) : req_(&req) {}
  explicit Params(const json& body) : body_(&body) {}

  bool has(const char* name) const {
    return req_ ? req_->has_param(name) : body_->contains(name) && !(*body_)[name].is_null();
  }

  template <class T>
  T get(const char* name, T fallback) const {
    if (!has(name)) return fallback;
    if (req_) return parse_number<T>(req_->get_param_value(name), name);
    const json& v = (*body_)[name];
    if (!v.is_number()) throw HttpError(400, std::string("'") + name + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || v.get<double>() < 0) {
        throw HttpError(400, std::string("'") + name + "' must be a non-negative integer");
      }
    }
    return v.get<T>();
  }

  std::string text(const char* name, const std::string& fallback) const {
    if (!has(name)) return fallback;
    if (req_) return req_->get_param_value(name);
    const json& v = (*body_)[name];
    if (!v.is_string()) throw HttpError(400, std::string("'") + name + "' must be a string");
    return v.get<std::string>();
  }

 private:
  const httplib::Request* req_ = nullptr;
  const json* body_ = nullptr;
};

RasterQuery parse_query(const Params& p, const ServiceOptions& options) {
  RasterQuery q;
  if (!p.has("dataset")) throw HttpError(400, "missing 'dataset'");
  q.dataset = p.text("dataset", "");
  q.kernel.bandwidth = p.get<double>("sigma", kDefaultBandwidth);
  if (!(q.kernel.bandwidth > 0.0)) throw HttpError(400, "sigma must be positive");
  const long w = p.get<long>("w", 256);
  const long h = p.get<long>("h", 256);
  if (w < 1 || h < 1) throw HttpError(400, "grid dimensions must be >= 1");
  if (static_cast<unsigned long>(w) * static_cast<unsigned long>(h) > options.max_pixels) {
    throw HttpError(413, "grid exceeds the pixel budget of " + std::to_string(options.max_pixels));
  }
  q.grid.width = static_cast<int>(w);
  q.grid.height = static_cast<int>(h);
  q.grid.extent = {p.get<double>("x0", 0.0), p.get<double>("y0", 0.0), p.get<double>("x1", 1.0),
                   p.get<double>("y1", 1.0)};
  if (!(q.grid.extent.width() > 0.0) || !(q.grid.extent.height() > 0.0)) throw HttpError(400, "degenerate extent");
  q.variant = parse_variant(p.text("variant", "full"));
  q.k = p.get<std::size_t>("k", 0);
  q.seed = p.get<std::uint64_t>("seed", 0);
  if (p.has("percentage") || p.has("radius")) {
    DenoiseParams d{p.get<double>("percentage", 0.05), p.get<double>("radius", 0.0)};
    try {
      d.validate();
    } catch (const DomainError& e) {
      throw HttpError(400, e.what());
    }
    q.denoise = d;
  }
  return q;
}

RegionSelection parse_region(const json& body) {
  if (!body.contains("region") || !body["region"].is_object()) throw HttpError(400, "missing 'region' object");
  const json& r = body["region"];
  auto num = [&r](const char* key) {
    if (!r.contains(key) || !r[key].is_number()) throw HttpError(400, std::string("region needs numeric '") + key + "'");
    const double v = r[key].get<double>();
    if (!std::isfinite(v)) throw HttpError(400, "non-finite region coordinate");
    return v;
  };
  const std::string shape = r.value("shape", std::string("rect"));
  try {
    if (shape == "rect" || shape == "rectangle") {
      return RegionSelection::rectangle(num("min_x"), num("min_y"), num("max_x"), num("max_y"));
    }
    if (shape == "disc") return RegionSelection::disc(num("cx"), num("cy"), num("r"));
  } catch (const DomainError& e) {
    throw HttpError(400, e.what());
  }
  throw HttpError(400, "region shape must be 'rect' or 'disc'");
}

json raster_meta(const RasterQuery& q, const DensityRaster& r, double reference_max) {
  return {{"width", r.grid.width},
          {"height", r.grid.height},
          {"extent", {r.grid.extent.min_x, r.grid.extent.min_y, r.grid.extent.max_x, r.grid.extent.max_y}},
          {"sigma", r.kernel.bandwidth},
          {"k", r.source_size},
          {"variant", std::string(variant_name(q.variant))},
          {"source_size", r.source_size},
          {"reference_max", reference_max},
          {"max", r.max_value()},
          {"dtype", "float32"},
          {"byte_order", "little"},
          {"row_order", "south_up"}};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

std::string content_id(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RasterQuery::cache_key() const {
  std::ostringstream key;
  key << dataset << '|' << variant_name(variant) << '|' << (variant == Variant::full ? 0 : k) << '|'
      << (variant == Variant::rs ? seed : 0) << '|' << hex_double(kernel.bandwidth) << '|' << grid.width << 'x'
      << grid.height << '|' << hex_double(grid.extent.min_x) << ',' << hex_double(grid.extent.min_y) << ','
      << hex_double(grid.extent.max_x) << ',' << hex_double(grid.extent.max_y);
  if (denoise) key << "|dn:" << hex_double(denoise->percentage) << ',' << hex_double(denoise->radius);
  return key.str();
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

std::shared_ptr<const DatasetEntry> Service::register_bytes(const std::string& bytes) {
  const std::string id = content_id(bytes);
  if (auto existing = find(id)) return existing;
  auto entry = std::make_shared<DatasetEntry>();
  entry->id = id;
  entry->dataset = decode_priority_dataset(bytes);
  const auto& ps = entry->dataset.points;
  entry->normalized = ps.normalized();
  std::lock_guard lock(datasets_mutex_);
  auto [it, inserted] = datasets_.emplace(id, std::move(entry));
  return it->second;
}

std::shared_ptr<const DatasetEntry> Service::register_path(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return register_bytes(std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

std::shared_ptr<const DatasetEntry> Service::find(const std::string& id) const {
  std::lock_guard lock(datasets_mutex_);
  auto it = datasets_.find(id);
  return it == datasets_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const DatasetEntry>> Service::datasets() const {
  std::lock_guard lock(datasets_mutex_);
  std::vector<std::shared_ptr<const DatasetEntry>> out;
  for (const auto& [id, e] : datasets_) out.push_back(e);
  return out;
}

std::size_t Service::cache_hits() const noexcept {
  std::lock_guard lock(cache_mutex_);
  return hits_;
}

std::shared_ptr<const DensityRaster> Service::cached(const std::string& key) {
  std::lock_guard lock(cache_mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return nullptr;
  lru_.splice(lru_.begin(), lru_, it->second);
  ++hits_;
  return it->second->second;
}

void Service::store(const std::string& key, std::shared_ptr<const DensityRaster> raster) {
  std::lock_guard lock(cache_mutex_);
  if (index_.count(key)) return;
  lru_.emplace_front(key, std::move(raster));
  index_[key] = lru_.begin();
  while (lru_.size() > options_.cache_entries) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::shared_ptr<const DensityRaster> Service::full_raster(const RasterQuery& query) {
  RasterQuery full = query;
  full.variant = Variant::full;
  full.k = 0;
  full.seed = 0;
  full.denoise.reset();
  return raster(full);
}

std::shared_ptr<const DensityRaster> Service::compute(const RasterQuery& q) {
  auto entry = find(q.dataset);
  if (!entry) throw HttpError(404, "unknown dataset '" + q.dataset + "'");
  const std::size_t n = entry->normalized.size();
  const std::size_t k = q.variant == Variant::full || q.k == 0 ? n : q.k;
  if (k > n) throw HttpError(400, "k exceeds dataset size " + std::to_string(n));

  if (q.denoise) {
    RasterQuery plain = q;
    plain.denoise.reset();
    const auto base = raster(plain);
    const auto ref = full_raster(q)->max_value();
    if (!(ref > 0.0)) throw HttpError(400, "full raster is zero over this extent; cannot denoise");
    return std::make_shared<const DensityRaster>(apply_denoise(*base, denoise_mask(*base, *q.denoise, ref)));
  }

  std::span<const NormalizedPoint> all(entry->normalized);
  switch (q.variant) {
    case Variant::full:
      return std::make_shared<const DensityRaster>(kde_raster(all, q.grid, q.kernel));
    case Variant::coreset:
      // k = n is the full set in the same order, so the bytes match `full`.
      return std::make_shared<const DensityRaster>(kde_raster(all.first(k), q.grid, q.kernel));
    case Variant::rs:
      return std::make_shared<const DensityRaster>(kde_raster(gather(all, random_sample(n, k, q.seed)), q.grid, q.kernel));
  }
  throw HttpError(400, "bad variant");
}

std::shared_ptr<const DensityRaster> Service::raster(const RasterQuery& query) {
  const std::string key = query.cache_key();
  if (auto hit = cached(key)) return hit;
  auto fresh = compute(query);
  store(key, fresh);
  return fresh;
}

void Service::mount(httplib::Server& server) {
  const std::string origin = options_.cors_origin;
  server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                              {"Access-Control-Expose-Headers", "X-Kdcs-Meta, X-Kdcs-Linf, X-Kdcs-Masked-Count"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const HttpError& e) {
      send_json(res, e.status(), {{"error", e.what()}});
    } catch (const CannotSuppressError& e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const kdcs::Error& e) {
      send_json(res, 400, {{"error", e.what()}});
    } catch (const json::exception& e) {
      send_json(res, 400, {{"error", std::string("bad JSON: ") + e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  });

  server.Get("/datasets", [this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& e : datasets()) list.push_back(dataset_json(*e));
    send_json(res, 200, {{"datasets", list}});
  });

  server.Get(R"(/datasets/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto e = find(req.matches[1]);
    if (!e) throw HttpError(404, "unknown dataset");
    send_json(res, 200, dataset_json(*e));
  });

  server.Post("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<const DatasetEntry> entry;
    try {
      if (req.get_header_value("Content-Type").starts_with("application/json")) {
        const json body = json::parse(req.body);
        if (!body.contains("path") || !body["path"].is_string()) throw HttpError(400, "expected {\"path\": ...}");
        entry = register_path(body["path"].get<std::string>());
      } else {
        entry = register_bytes(req.body);
      }
    } catch (const kdcs::Error& e) {
      throw HttpError(400, e.what());
    }
    send_json(res, 200, dataset_json(*entry));
  });

  server.Get("/raster", [this](const httplib::Request& req, httplib::Response& res) {
    const RasterQuery q = parse_query(Params(req), options_);
    const auto r = raster(q);
    const double ref = full_raster(q)->max_value();
    res.set_header("X-Kdcs-Meta", raster_meta(q, *r, ref).dump());
    res.set_content(encode_float32(r->values), "application/octet-stream");
  });

  server.Get("/error", [this](const httplib::Request& req, httplib::Response& res) {
    const Params p(req);
    RasterQuery q = parse_query(p, options_);
    if (q.variant == Variant::full) q.variant = Variant::coreset;
    const std::string kind = p.text("kind", "abs");
    if (kind != "abs" && kind != "rel") throw HttpError(400, "kind must be abs or rel");
    const auto full = full_raster(q);
    const auto approx = raster(q);
    const ErrorReport report = error_report(*full, *approx);
    json meta = raster_meta(q, *approx, full->max_value());
    meta["kind"] = kind;
    meta["linf"] = report.linf;
    meta["rel_floor"] = report.rel_floor;
    meta["masked_count"] = report.masked_count;
    res.set_header("X-Kdcs-Meta", meta.dump());
    res.set_header("X-Kdcs-Linf", hex_double(report.linf));
    res.set_header("X-Kdcs-Masked-Count", std::to_string(kind == "rel" ? report.masked_count : 0));
    res.set_content(encode_float32(kind == "abs" ? report.abs_error : report.rel_error), "application/octet-stream");
  });

  server.Post("/denoise/suggest", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      throw HttpError(400, "body must be JSON");
    }
    if (!body.is_object()) throw HttpError(400, "body must be a JSON object");
    RasterQuery q = parse_query(Params(body), options_);
    if (!body.contains("variant")) q.variant = Variant::coreset;
    q.denoise.reset();
    const RegionSelection region = parse_region(body);
    std::vector<double> candidates;
    if (body.contains("radius_candidates")) {
      if (!body["radius_candidates"].is_array()) throw HttpError(400, "radius_candidates must be an array");
      for (const auto& v : body["radius_candidates"]) {
        if (!v.is_number()) throw HttpError(400, "radius_candidates must be numbers");
        candidates.push_back(v.get<double>());
      }
      if (candidates.empty()) throw HttpError(400, "radius_candidates must be non-empty");
    }
    const auto r = raster(q);
    const double ref = full_raster(q)->max_value();
    DenoiseSuggestion s;
    try {
      s = suggest_params(*r, region, ref, candidates);
    } catch (const DomainError& e) {
      throw HttpError(400, e.what());
    }
    send_json(res, 200,
              {{"percentage", s.params.percentage},
               {"radius", s.params.radius},
               {"threshold", s.threshold},
               {"reference_max", ref}});
  });
}

int run_server(Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  std::fprintf(stderr, "kdcs: serving on http://%s:%d\n", host.c_str(), port);
  return server.listen(host, port) ? 0 : 2;
}

}  // namespace kdcs::service
