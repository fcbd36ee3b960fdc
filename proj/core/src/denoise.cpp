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

#include "kdcs/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kdcs/error.hpp"

namespace kdcs {
namespace {

constexpr long kUnreached = std::numeric_limits<long>::max();
constexpr double kThresholdMargin = 1e-9;

// For each column, the row distance |dj| from every pixel to the nearest
// seed pixel in that column (kUnreached if the column has none).
std::vector<long> column_distances(const GridSpec& grid, const std::vector<std::uint8_t>& seed) {
  const int w = grid.width;
  const int h = grid.height;
  std::vector<long> dist(grid.pixel_count(), kUnreached);
  for (int i = 0; i < w; ++i) {
    long last = kUnreached;
    for (int j = 0; j < h; ++j) {
      if (seed[grid.index(i, j)]) last = j;
      if (last != kUnreached) dist[grid.index(i, j)] = j - last;
    }
    last = kUnreached;
    for (int j = h - 1; j >= 0; --j) {
      if (seed[grid.index(i, j)]) last = j;
      if (last != kUnreached) dist[grid.index(i, j)] = std::min(dist[grid.index(i, j)], last - j);
    }
  }
  return dist;
}

}  // namespace

void DenoiseParams::validate() const {
  if (!(percentage > 0.0 && percentage <= 1.0)) throw DomainError("percentage must be in (0,1]");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("radius must be finite and >= 0");
}

RegionSelection::RegionSelection(Shape shape, double a, double b, double c, double d)
    : shape_(shape), c_{a, b, c, d} {}

RegionSelection RegionSelection::rectangle(double min_x, double min_y, double max_x, double max_y) {
  if (!(max_x > min_x) || !(max_y > min_y)) throw DomainError("degenerate rectangle region");
  return {Shape::rectangle, min_x, min_y, max_x, max_y};
}

RegionSelection RegionSelection::disc(double center_x, double center_y, double radius) {
  if (!(radius > 0.0) || !std::isfinite(center_x) || !std::isfinite(center_y)) {
    throw DomainError("degenerate disc region");
  }
  return {Shape::disc, center_x, center_y, radius, 0.0};
}

bool RegionSelection::contains(double x, double y) const noexcept {
  if (shape_ == Shape::rectangle) return x >= c_[0] && x <= c_[2] && y >= c_[1] && y <= c_[3];
  const double dx = x - c_[0];
  const double dy = y - c_[1];
  return dx * dx + dy * dy <= c_[2] * c_[2];
}

std::size_t DenoiseMask::kept_count() const noexcept {
  return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), std::uint8_t{1}));
}

// Exact distance transform restricted to `radius`: the column pass gives the
// nearest high row per column, the row pass scans only columns within the
// radius. The final comparison is the same offset_distance_sq <= r^2 test a
// pairwise check would make.
DenoiseMask denoise_mask_abs(const DensityRaster& raster, double threshold, double radius) {
  const GridSpec& grid = raster.grid;
  if (raster.values.size() != grid.pixel_count()) throw DomainError("raster size does not match its grid");
  if (!(radius >= 0.0)) throw DomainError("radius must be >= 0");
  std::vector<std::uint8_t> high(grid.pixel_count());
  for (std::size_t p = 0; p < high.size(); ++p) high[p] = raster.values[p] >= threshold ? 1 : 0;

  DenoiseMask mask{grid, high};
  const auto col = column_distances(grid, high);
  const double r2 = radius * radius;
  const long reach = static_cast<long>(std::floor(radius / grid.pitch_x())) + 1;
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      if (mask.kept[grid.index(i, j)]) continue;
      const long lo = std::max<long>(0, i - reach);
      const long hi = std::min<long>(grid.width - 1, i + reach);
      for (long c = lo; c <= hi; ++c) {
        const long dj = col[grid.index(static_cast<int>(c), j)];
        if (dj == kUnreached) continue;
        if (grid.offset_distance_sq(i - c, dj) <= r2) {
          mask.kept[grid.index(i, j)] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

DenoiseMask denoise_mask(const DensityRaster& raster, const DenoiseParams& params,
                         std::optional<double> reference_max) {
  params.validate();
  const double ref = reference_max ? *reference_max : raster.max_value();
  if (!(ref > 0.0)) throw DomainError("reference maximum must be positive");
  return denoise_mask_abs(raster, params.percentage * ref, params.radius);
}

DensityRaster apply_denoise(const DensityRaster& raster, const DenoiseMask& mask) {
  if (!(mask.grid == raster.grid) || mask.kept.size() != raster.values.size()) {
    throw DomainError("denoise mask shape does not match raster");
  }
  DensityRaster out = raster;
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    if (!mask.kept[p]) out.values[p] = 0.0;
  }
  return out;
}

std::vector<double> default_radius_candidates(const GridSpec& grid) {
  constexpr int kCount = 16;
  const double first = std::max(grid.pitch_x(), grid.pitch_y());
  const double last = 0.25 * std::hypot(grid.extent.width(), grid.extent.height());
  std::vector<double> out(kCount);
  if (!(last > first)) {
    std::fill(out.begin(), out.end(), first);
    return out;
  }
  const double ratio = std::pow(last / first, 1.0 / (kCount - 1));
  for (int k = 0; k < kCount; ++k) out[static_cast<std::size_t>(k)] = first * std::pow(ratio, k);
  out.back() = last;
  return out;
}

DenoiseSuggestion suggest_params(const DensityRaster& raster, const RegionSelection& region,
                                 std::optional<double> reference_max, std::span<const double> radius_candidates) {
  const GridSpec& grid = raster.grid;
  if (raster.values.size() != grid.pixel_count()) throw DomainError("raster size does not match its grid");
  std::vector<double> defaults;
  if (radius_candidates.empty()) {
    defaults = default_radius_candidates(grid);
    radius_candidates = defaults;
  }
  if (!std::is_sorted(radius_candidates.begin(), radius_candidates.end()) || radius_candidates.front() < 0.0) {
    throw DomainError("radius candidates must be non-negative and ascending");
  }
  const double ref = reference_max ? *reference_max : raster.max_value();
  if (!(ref > 0.0)) throw DomainError("reference maximum must be positive");

  std::vector<std::uint8_t> in_region(grid.pixel_count(), 0);
  int col_lo = grid.width;
  int col_hi = -1;
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      if (region.contains(grid.center_x(i), grid.center_y(j))) {
        in_region[grid.index(i, j)] = 1;
        col_lo = std::min(col_lo, i);
        col_hi = std::max(col_hi, i);
      }
    }
  }
  if (col_hi < 0) throw DomainError("region contains no pixel of the raster");

  // Distance from every pixel to the region, only out to the largest radius.
  const double r_max = radius_candidates.back();
  const double r_max2 = r_max * r_max;
  const long reach = static_cast<long>(std::floor(r_max / grid.pitch_x())) + 1;
  const auto col = column_distances(grid, in_region);
  std::vector<std::pair<double, double>> near;  // (distance^2, value)
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const long lo = std::max<long>(col_lo, i - reach);
      const long hi = std::min<long>(col_hi, i + reach);
      double best = std::numeric_limits<double>::infinity();
      for (long c = lo; c <= hi; ++c) {
        const long dj = col[grid.index(static_cast<int>(c), j)];
        if (dj == kUnreached) continue;
        best = std::min(best, grid.offset_distance_sq(i - c, dj));
      }
      if (best <= r_max2) near.emplace_back(best, raster.at(i, j));
    }
  }
  std::sort(near.begin(), near.end());
  for (std::size_t p = 1; p < near.size(); ++p) near[p].second = std::max(near[p].second, near[p - 1].second);

  std::optional<DenoiseSuggestion> best;
  for (double r : radius_candidates) {
    const double r2 = r * r;
    auto it = std::upper_bound(near.begin(), near.end(), r2,
                               [](double v, const std::pair<double, double>& e) { return v < e.first; });
    // Region pixels have distance 0, so the prefix is never empty.
    const double peak = std::prev(it)->second;
    double threshold = peak * (1.0 + kThresholdMargin);
    if (!(threshold > peak)) threshold = std::nextafter(peak, std::numeric_limits<double>::infinity());
    double percentage = threshold / ref;
    // The mask recomputes percentage * ref; nudge until that is still above peak.
    while (percentage * ref <= peak) percentage = std::nextafter(percentage, 2.0);
    if (percentage > 1.0) continue;
    if (!best || percentage < best->params.percentage ||
        (percentage == best->params.percentage && r > best->params.radius)) {
      best = DenoiseSuggestion{{percentage, r}, percentage * ref};
    }
  }
  if (!best) {
    throw CannotSuppressError("cannot suppress: the region reaches the reference maximum for every candidate radius");
  }
  return *best;
}

}  // namespace kdcs
