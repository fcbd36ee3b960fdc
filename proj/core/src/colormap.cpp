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

#include "kdcs/colormap.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "kdcs/error.hpp"

namespace kdcs {
namespace {

constexpr std::array<std::string_view, 6> kNames = {"density", "ylorrd", "blues", "greens", "purples", "rdbu"};

constexpr Rgb kMaskedGray{217, 217, 217};

std::uint8_t lerp8(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * t));
}

void put(Image& img, int x, int y, Rgb c) {
  const std::size_t o = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(x));
  img.rgb[o] = c.r;
  img.rgb[o + 1] = c.g;
  img.rgb[o + 2] = c.b;
}

Image blank(const GridSpec& grid) {
  Image img;
  img.width = grid.width;
  img.height = grid.height;
  img.rgb.assign(3 * grid.pixel_count(), 255);
  return img;
}

}  // namespace

Colormap::Colormap(std::string name, std::vector<Rgb> stops) : name_(std::move(name)), stops_(std::move(stops)) {
  if (stops_.size() < 2) throw DomainError("colormap needs at least two stops");
}

Colormap Colormap::by_name(std::string_view name) {
  if (name == "density") {
    return Colormap("density", {{198, 219, 239}, {158, 202, 225}, {254, 224, 144}, {253, 174, 97},
                              {244, 109, 67}, {215, 48, 39}, {165, 0, 38}});
  }
  if (name == "ylorrd") {
    return Colormap("ylorrd", {{255, 255, 204}, {255, 237, 160}, {254, 217, 118}, {254, 178, 76},
                               {253, 141, 60}, {252, 78, 42}, {227, 26, 28}, {189, 0, 38}, {128, 0, 38}});
  }
  if (name == "blues") {
    return Colormap("blues", {{247, 251, 255}, {222, 235, 247}, {198, 219, 239}, {158, 202, 225},
                              {107, 174, 214}, {66, 146, 198}, {33, 113, 181}, {8, 81, 156}, {8, 48, 107}});
  }
  if (name == "greens") {
    return Colormap("greens", {{247, 252, 245}, {229, 245, 224}, {199, 233, 192}, {161, 217, 155},
                               {116, 196, 118}, {65, 171, 93}, {35, 139, 69}, {0, 109, 44}, {0, 68, 27}});
  }
  if (name == "purples") {
    return Colormap("purples", {{252, 251, 253}, {239, 237, 245}, {218, 218, 235}, {188, 189, 220},
                                {158, 154, 200}, {128, 125, 186}, {106, 81, 163}, {84, 39, 143}, {63, 0, 125}});
  }
  if (name == "rdbu") {
    // Red where the approximation overshoots (negative full - approx), blue
    // where it undershoots.
    return Colormap("rdbu", {{103, 0, 31}, {178, 24, 43}, {214, 96, 77}, {244, 165, 130}, {253, 219, 199},
                             {247, 247, 247}, {209, 229, 240}, {146, 197, 222}, {67, 147, 195}, {33, 102, 172},
                             {5, 48, 97}});
  }
  throw DomainError("unknown colormap '" + std::string(name) + "'");
}

std::span<const std::string_view> Colormap::names() { return kNames; }

Rgb Colormap::sample(double t) const noexcept {
  if (!(t > 0.0)) return stops_.front();
  if (t >= 1.0) return stops_.back();
  const double pos = t * static_cast<double>(stops_.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(k);
  const Rgb& a = stops_[k];
  const Rgb& b = stops_[k + 1];
  return {lerp8(a.r, b.r, f), lerp8(a.g, b.g, f), lerp8(a.b, b.b, f)};
}

Rgb Image::at(int x, int y) const {
  const std::size_t o = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
  return {rgb[o], rgb[o + 1], rgb[o + 2]};
}

Image transfer_map(const DensityRaster& raster, const Colormap& colormap, double floor_fraction,
                   std::optional<double> reference_max) {
  if (!(floor_fraction >= 0.0 && floor_fraction < 1.0)) throw DomainError("floor_fraction must be in [0,1)");
  const GridSpec& grid = raster.grid;
  Image img = blank(grid);
  const double ref = reference_max ? *reference_max : raster.max_value();
  if (!(ref > 0.0)) return img;
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const double ratio = raster.at(i, j) / ref;
      if (!(ratio >= floor_fraction) || ratio <= 0.0) continue;
      put(img, i, grid.height - 1 - j, colormap.sample((ratio - floor_fraction) / (1.0 - floor_fraction)));
    }
  }
  return img;
}

Image diverging_map(std::span<const double> values, const GridSpec& grid, const Colormap& colormap,
                    std::optional<double> scale) {
  if (values.size() != grid.pixel_count()) throw DomainError("diverging_map: size mismatch");
  double s = 0.0;
  if (scale) {
    s = *scale;
  } else {
    for (double v : values) {
      if (std::isfinite(v)) s = std::max(s, std::abs(v));
    }
  }
  Image img = blank(grid);
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const double v = values[grid.index(i, j)];
      const int y = grid.height - 1 - j;
      if (std::isnan(v)) {
        put(img, i, y, kMaskedGray);
      } else {
        put(img, i, y, colormap.sample(s > 0.0 ? 0.5 + 0.5 * v / s : 0.5));
      }
    }
  }
  return img;
}

}  // namespace kdcs
