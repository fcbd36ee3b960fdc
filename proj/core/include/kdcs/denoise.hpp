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

#include "kdcs/kde.hpp"

namespace kdcs {

// percentage scales the reference maximum into the "high density" level;
// radius (domain units) is how far a high pixel vouches for its neighbours.
struct DenoiseParams {
  double percentage = 0.05;
  double radius = 0.0;

  void validate() const;
};

class RegionSelection {
 public:
  enum class Shape : std::uint8_t { rectangle, disc };

  static RegionSelection rectangle(double min_x, double min_y, double max_x, double max_y);
  static RegionSelection disc(double center_x, double center_y, double radius);

  Shape shape() const noexcept { return shape_; }
  bool contains(double x, double y) const noexcept;

  // Rectangle: (min_x, min_y, max_x, max_y). Disc: (cx, cy, r, unused).
  const double* coords() const noexcept { return c_; }

 private:
  RegionSelection(Shape shape, double a, double b, double c, double d);

  Shape shape_;
  double c_[4];
};

struct DenoiseMask {
  GridSpec grid;
  std::vector<std::uint8_t> kept;  // 1 = drawn, 0 = suppressed

  std::size_t kept_count() const noexcept;
};

// Pixel x is kept iff some pixel y with offset_distance_sq(x, y) <= radius^2
// (x itself included) has value >= percentage * reference_max.
// reference_max defaults to the raster's maximum.
DenoiseMask denoise_mask(const DensityRaster& raster, const DenoiseParams& params,
                         std::optional<double> reference_max = std::nullopt);

// Same predicate with an explicit absolute threshold.
DenoiseMask denoise_mask_abs(const DensityRaster& raster, double threshold, double radius);

// Suppressed pixels become 0; kept pixels are untouched.
DensityRaster apply_denoise(const DensityRaster& raster, const DenoiseMask& mask);

struct DenoiseSuggestion {
  DenoiseParams params;
  double threshold = 0.0;  // percentage * reference_max
};

// 16 radii spaced geometrically from one pixel pitch to a quarter of the
// extent diagonal.
std::vector<double> default_radius_candidates(const GridSpec& grid);

// For each candidate radius r, the smallest suppressing threshold is just
// above the largest value within r of the region. Returns the pair with the
// smallest percentage; among radii sharing that percentage, the largest.
// Throws DomainError when no pixel center lies in the region and
// CannotSuppressError when every candidate needs a percentage above 1.
DenoiseSuggestion suggest_params(const DensityRaster& raster, const RegionSelection& region,
                                 std::optional<double> reference_max = std::nullopt,
                                 std::span<const double> radius_candidates = {});

}  // namespace kdcs
