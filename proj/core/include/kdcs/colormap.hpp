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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kdcs/kde.hpp"

namespace kdcs {

struct Rgb {
  std::uint8_t r = 255;
  std::uint8_t g = 255;
  std::uint8_t b = 255;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kBackground{255, 255, 255};

// Piecewise-linear colormap. Sequential maps run from light (t = 0) to dark
// (t = 1); diverging maps have their neutral color at t = 0.5.
class Colormap {
 public:
  Colormap(std::string name, std::vector<Rgb> stops);

  // ColorBrewer-derived maps: "density" (light blue to dark red), "ylorrd",
  // "blues", "greens", "purples", and the diverging "rdbu".
  static Colormap by_name(std::string_view name);
  static std::span<const std::string_view> names();

  const std::string& name() const noexcept { return name_; }
  const std::vector<Rgb>& stops() const noexcept { return stops_; }
  Rgb sample(double t) const noexcept;

 private:
  std::string name_;
  std::vector<Rgb> stops_;
};

// RGB8 image, top row first (north up).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Rgb at(int x, int y) const;
};

// Colors value v by t = (v/ref - floor)/(1 - floor); pixels with
// v < floor_fraction * ref render as background. ref defaults to the
// raster's own maximum; pass the full dataset's maximum so that every pane
// shares one scale. A non-positive ref yields an all-background image.
Image transfer_map(const DensityRaster& raster, const Colormap& colormap,
                   double floor_fraction = kDefaultFloorFraction,
                   std::optional<double> reference_max = std::nullopt);

// Signed rasters (error maps): t = 0.5 + 0.5 * v / scale through a diverging
// map, NaN pixels in light gray. scale defaults to max |v|.
Image diverging_map(std::span<const double> values, const GridSpec& grid, const Colormap& colormap,
                    std::optional<double> scale = std::nullopt);

}  // namespace kdcs
