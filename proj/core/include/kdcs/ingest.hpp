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
#include <span>
#include <vector>

#include "kdcs/zorder.hpp"

namespace kdcs {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static BoundingBox of(std::span<const Point> points);
  double width() const noexcept { return max_x - min_x; }
  double height() const noexcept { return max_y - min_y; }
};

// Uniform-scale map of a bounding box into [0,1]^2: the longer side spans
// [0,1], the shorter one is centered.
class Normalization {
 public:
  Normalization() = default;
  static Normalization fit(const BoundingBox& bbox);

  NormalizedPoint apply(const Point& p) const noexcept;
  Point invert(const NormalizedPoint& q) const noexcept;

  double scale() const noexcept { return scale_; }

 private:
  double min_x_ = 0.0;
  double min_y_ = 0.0;
  double pad_x_ = 0.0;
  double pad_y_ = 0.0;
  double scale_ = 1.0;
};

struct PointSet {
  std::vector<Point> points;
  BoundingBox bbox;
  Normalization norm;

  // Computes bbox and normalization; throws DomainError on an empty input or
  // non-finite coordinates.
  static PointSet from_points(std::vector<Point> points);

  std::size_t size() const noexcept { return points.size(); }
  std::vector<NormalizedPoint> normalized() const;
};

enum class TextFormat : std::uint8_t { whitespace, csv };

struct LoadResult {
  PointSet set;
  std::size_t skipped_lines = 0;
};

// One point per line; '#' lines and blank lines are ignored, lines without
// two leading numeric fields are counted in skipped_lines. swap_xy reads
// "y x" (e.g. lat lon) lines.
LoadResult load_points(const std::filesystem::path& path, TextFormat format, bool swap_xy = false);

// "x y" per line with round-trip precision.
void save_points(std::span<const Point> points, const std::filesystem::path& path);

// Recursive multi-scale dataset in [0,1]^2. Each rectangle contributes its 4
// corners and the images of (0.5,0.5), (0.5,0.8), (0.8,0.5), (0.8,0.8), each
// repeated max(1, round(scale * perimeter)) times, then splits both axes at
// relative 0.5 and 0.8 and recurses into the 9 pieces, down to `depth`
// levels. `seed` shuffles the output order.
PointSet synth_generate(int depth, double scale, std::uint64_t seed);

// Number of points synth_generate(depth, scale, *) produces.
std::size_t synth_count(int depth, double scale);

// Bisection on scale for the count closest to `target` at this depth.
double calibrate_synth_scale(int depth, std::size_t target);

inline constexpr int kDefaultSynthDepth = 5;
inline constexpr std::size_t kDefaultSynthCount = 532900;

}  // namespace kdcs
