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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kdcs/dataset_io.hpp"
#include "kdcs/denoise.hpp"
#include "kdcs/kde.hpp"

namespace httplib {
class Server;
}

namespace kdcs::service {

struct ServiceOptions {
  std::size_t max_pixels = std::size_t{2048} * 2048;
  std::size_t cache_entries = 64;
  std::string cors_origin = "*";
};

struct DatasetEntry {
  std::string id;
  PriorityDataset dataset;
  std::vector<NormalizedPoint> normalized;  // priority order
};

enum class Variant : std::uint8_t { full, coreset, rs };

// One raster request, everything that determines the response bytes.
struct RasterQuery {
  std::string dataset;
  std::size_t k = 0;  // ignored for Variant::full; 0 = all points
  KernelParams kernel{};
  GridSpec grid{256, 256, {}};
  Variant variant = Variant::full;
  std::uint64_t seed = 0;
  std::optional<DenoiseParams> denoise;

  std::string cache_key() const;
};

// Thrown for request problems; carries the HTTP status to answer with.
class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// FNV-1a 64-bit digest rendered as 16 hex digits; dataset ids are content
// addresses of the registered file bytes.
std::string content_id(const std::string& bytes);

// Engine state behind the HTTP facade. Every method is safe to call from
// concurrent request handlers; responses depend only on the registered bytes
// and the query.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  std::shared_ptr<const DatasetEntry> register_bytes(const std::string& bytes);
  std::shared_ptr<const DatasetEntry> register_path(const std::filesystem::path& path);
  std::shared_ptr<const DatasetEntry> find(const std::string& id) const;
  std::vector<std::shared_ptr<const DatasetEntry>> datasets() const;

  // Full-data raster for the query's dataset, kernel and grid.
  std::shared_ptr<const DensityRaster> full_raster(const RasterQuery& query);
  std::shared_ptr<const DensityRaster> raster(const RasterQuery& query);

  std::size_t cache_hits() const noexcept;
  const ServiceOptions& options() const noexcept { return options_; }

  // Installs every route (and CORS handling) on `server`.
  void mount(httplib::Server& server);

 private:
  std::shared_ptr<const DensityRaster> cached(const std::string& key);
  void store(const std::string& key, std::shared_ptr<const DensityRaster> raster);
  std::shared_ptr<const DensityRaster> compute(const RasterQuery& query);

  ServiceOptions options_;
  mutable std::mutex datasets_mutex_;
  std::map<std::string, std::shared_ptr<const DatasetEntry>> datasets_;

  mutable std::mutex cache_mutex_;
  std::list<std::pair<std::string, std::shared_ptr<const DensityRaster>>> lru_;
  std::unordered_map<std::string, decltype(lru_)::iterator> index_;
  std::size_t hits_ = 0;
};

// Blocking: binds and serves until the process is stopped.
int run_server(Service& service, const std::string& host, int port);

}  // namespace kdcs::service
