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
#include <optional>
#include <span>
#include <vector>

#include "kdcs/zorder.hpp"

namespace kdcs {

inline constexpr double kDefaultBandwidth = 0.02;
inline constexpr double kDefaultTailEps = 1e-12;
inline constexpr int kDefaultGridSize = 512;
inline constexpr double kDefaultFloorFraction = 0.05;

// Gaussian kernel exp(-|p - x|^2 / bandwidth^2).
struct KernelParams {
  double bandwidth = kDefaultBandwidth;

  void validate() const;
  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

struct Extent {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;

  double width() const noexcept { return max_x - min_x; }
  double height() const noexcept { return max_y - min_y; }
  friend bool operator==(const Extent&, const Extent&) = default;
};

// Pixel (i, j) covers column i from the left and row j from the bottom
// (row 0 sits at min_y). Values are stored row-major.
struct GridSpec {
  int width = kDefaultGridSize;
  int height = kDefaultGridSize;
  Extent extent{};

  void validate() const;

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i);
  }
  double pitch_x() const noexcept { return extent.width() / width; }
  double pitch_y() const noexcept { return extent.height() / height; }
  double center_x(int i) const noexcept { return extent.min_x + (i + 0.5) * pitch_x(); }
  double center_y(int j) const noexcept { return extent.min_y + (j + 0.5) * pitch_y(); }

  // Squared domain distance between the centers of two pixels separated by
  // (di, dj) pixels. Every pixel-to-pixel distance in the engine uses this
  // exact expression so that fast and reference paths agree bit-for-bit.
  double offset_distance_sq(long di, long dj) const noexcept {
    const double dx = static_cast<double>(di) * pitch_x();
    const double dy = static_cast<double>(dj) * pitch_y();
    return dx * dx + dy * dy;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct DensityRaster {
  GridSpec grid;
  std::vector<double> values;
  KernelParams kernel;
  std::size_t source_size = 0;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double max_value() const noexcept;
};

struct KdeOptions {
  // Per-point contributions below tail_eps are dropped by the fast path.
  double tail_eps = kDefaultTailEps;
  // 0 = std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned threads = 0;
};

// (1/|P|) sum_p exp(-|p - x|^2 / sigma^2), summed exactly.
double kde_eval(std::span<const NormalizedPoint> points, NormalizedPoint x, const KernelParams& kernel);

// Truncation radius sigma * sqrt(ln(1/tail_eps)).
double cutoff_radius(const KernelParams& kernel, double tail_eps);

// Fast raster: separable kernel tables inside a square of half-side
// cutoff_radius around every point. Each dropped term is < tail_eps, so the
// per-pixel deviation from kde_raster_exact is at most tail_eps plus
// roundoff.
DensityRaster kde_raster(std::span<const NormalizedPoint> points, const GridSpec& grid,
                         const KernelParams& kernel, const KdeOptions& options = {});

// kde_eval at every pixel center.
DensityRaster kde_raster_exact(std::span<const NormalizedPoint> points, const GridSpec& grid,
                               const KernelParams& kernel);

struct ErrorReport {
  GridSpec grid;
  double linf = 0.0;
  std::vector<double> abs_error;  // full - approx
  std::vector<double> rel_error;  // (full - approx) / full where valid, NaN elsewhere
  std::vector<std::uint8_t> rel_valid;
  double rel_floor = 0.0;
  std::size_t masked_count = 0;
};

// rel_floor defaults to kDefaultFloorFraction * full.max_value().
ErrorReport error_report(const DensityRaster& full, const DensityRaster& approx,
                         std::optional<double> rel_floor = std::nullopt);

std::vector<NormalizedPoint> gather(std::span<const NormalizedPoint> points,
                                    std::span<const std::size_t> indices);

}  // namespace kdcs
