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

#include "kdcs/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "kdcs/error.hpp"
#include "kdcs/random.hpp"

namespace kdcs {

BoundingBox BoundingBox::of(std::span<const Point> points) {
  if (points.empty()) throw DomainError("bounding box of an empty point set");
  BoundingBox b{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const auto& p : points) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

Normalization Normalization::fit(const BoundingBox& bbox) {
  Normalization n;
  n.min_x_ = bbox.min_x;
  n.min_y_ = bbox.min_y;
  const double side = std::max(bbox.width(), bbox.height());
  n.scale_ = side > 0.0 ? 1.0 / side : 1.0;
  n.pad_x_ = std::max(0.0, (1.0 - bbox.width() * n.scale_) * 0.5);
  n.pad_y_ = std::max(0.0, (1.0 - bbox.height() * n.scale_) * 0.5);
  return n;
}

NormalizedPoint Normalization::apply(const Point& p) const noexcept {
  const double x = (p.x - min_x_) * scale_ + pad_x_;
  const double y = (p.y - min_y_) * scale_ + pad_y_;
  return {std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)};
}

Point Normalization::invert(const NormalizedPoint& q) const noexcept {
  return {(q.x - pad_x_) / scale_ + min_x_, (q.y - pad_y_) / scale_ + min_y_};
}

PointSet PointSet::from_points(std::vector<Point> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite coordinate");
  }
  PointSet s;
  s.bbox = BoundingBox::of(points);
  s.norm = Normalization::fit(s.bbox);
  s.points = std::move(points);
  return s;
}

std::vector<NormalizedPoint> PointSet::normalized() const {
  std::vector<NormalizedPoint> out(points.size());
  std::transform(points.begin(), points.end(), out.begin(), [this](const Point& p) { return norm.apply(p); });
  return out;
}

namespace {

bool is_separator(char c, TextFormat format) {
  if (c == ' ' || c == '\t' || c == '\r') return true;
  return format == TextFormat::csv && (c == ',' || c == ';');
}

// Parses the next numeric field; false if the field is missing or not numeric.
bool next_field(std::string_view& rest, TextFormat format, double& out) {
  std::size_t b = 0;
  while (b < rest.size() && is_separator(rest[b], format)) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_separator(rest[e], format)) ++e;
  if (b == e) return false;
  const std::string_view field = rest.substr(b, e - b);
  const char* first = field.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(out)) return false;
  rest.remove_prefix(e);
  return true;
}

}  // namespace

LoadResult load_points(const std::filesystem::path& path, TextFormat format, bool swap_xy) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Point> points;
  std::size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view rest(line);
    const auto first = rest.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || rest[first] == '#') continue;
    double a = 0.0;
    double b = 0.0;
    if (next_field(rest, format, a) && next_field(rest, format, b)) {
      points.push_back(swap_xy ? Point{b, a} : Point{a, b});
    } else {
      ++skipped;
    }
  }
  if (in.bad()) throw Error("read error on " + path.string());
  if (points.empty()) throw Error("no valid points in " + path.string());
  return {PointSet::from_points(std::move(points)), skipped};
}

void save_points(std::span<const Point> points, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot write " + path.string());
  for (const auto& p : points) std::fprintf(f, "%.17g %.17g\n", p.x, p.y);
  const bool ok = std::fclose(f) == 0;
  if (!ok) throw Error("write error on " + path.string());
}

namespace {

constexpr double kSplits[4] = {0.0, 0.5, 0.8, 1.0};
constexpr double kInterior[4][2] = {{0.5, 0.5}, {0.5, 0.8}, {0.8, 0.5}, {0.8, 0.8}};

std::size_t replication(double scale, double w, double h) {
  const double r = std::round(scale * 2.0 * (w + h));
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

template <class Visit>
void visit_rects(int level, int depth, double x0, double y0, double w, double h, Visit& visit) {
  visit(x0, y0, w, h);
  if (level >= depth) return;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      visit_rects(level + 1, depth, x0 + kSplits[a] * w, y0 + kSplits[b] * h, (kSplits[a + 1] - kSplits[a]) * w,
                  (kSplits[b + 1] - kSplits[b]) * h, visit);
    }
  }
}

void check_depth(int depth) {
  if (depth < 1 || depth > 8) throw DomainError("synthetic depth must be in [1, 8]");
}

}  // namespace

std::size_t synth_count(int depth, double scale) {
  check_depth(depth);
  std::size_t total = 0;
  auto count = [&](double, double, double w, double h) { total += 8 * replication(scale, w, h); };
  visit_rects(1, depth, 0.0, 0.0, 1.0, 1.0, count);
  return total;
}

PointSet synth_generate(int depth, double scale, std::uint64_t seed) {
  check_depth(depth);
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw DomainError("synthetic scale must be finite and >= 0");
  std::vector<Point> points;
  points.reserve(synth_count(depth, scale));
  auto emit = [&](double x0, double y0, double w, double h) {
    const std::size_t reps = replication(scale, w, h);
    const Point local[8] = {{x0, y0},
                            {x0, y0 + h},
                            {x0 + w, y0},
                            {x0 + w, y0 + h},
                            {x0 + kInterior[0][0] * w, y0 + kInterior[0][1] * h},
                            {x0 + kInterior[1][0] * w, y0 + kInterior[1][1] * h},
                            {x0 + kInterior[2][0] * w, y0 + kInterior[2][1] * h},
                            {x0 + kInterior[3][0] * w, y0 + kInterior[3][1] * h}};
    for (const auto& p : local) {
      for (std::size_t r = 0; r < reps; ++r) points.push_back({std::min(p.x, 1.0), std::min(p.y, 1.0)});
    }
  };
  visit_rects(1, depth, 0.0, 0.0, 1.0, 1.0, emit);

  Rng rng(seed);
  for (std::size_t i = points.size(); i > 1; --i) std::swap(points[i - 1], points[rng.below(i)]);
  return PointSet::from_points(std::move(points));
}

double calibrate_synth_scale(int depth, std::size_t target) {
  double lo = 0.0;
  double hi = 1.0;
  while (synth_count(depth, hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) throw DomainError("synthetic target count unreachable");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (synth_count(depth, mid) < target ? lo : hi) = mid;
  }
  const auto gap = [&](double s) {
    const auto c = static_cast<double>(synth_count(depth, s));
    return std::abs(c - static_cast<double>(target));
  };
  return gap(lo) < gap(hi) ? lo : hi;
}

}  // namespace kdcs
