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

// Reference implementations used only by tests. Each one follows the plain
// definition with no shared code path into the engine it checks.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kdcs/kde.hpp"
#include "kdcs/zorder.hpp"

namespace kdcs::testing {

// Child index in the quadrant order lower-left, lower-right, upper-left,
// upper-right of a point inside a square split at (mid_x, mid_y).
inline int quadrant(double x, double y, double mid_x, double mid_y) {
  return (y >= mid_y ? 2 : 0) + (x >= mid_x ? 1 : 0);
}

// Recursive quadtree descent: -1 if a precedes b, 1 if b precedes a, 0 if
// they share a cell at depth `levels`.
inline int quadrant_compare(NormalizedPoint a, NormalizedPoint b, int levels) {
  double x0 = 0.0;
  double y0 = 0.0;
  double side = 1.0;
  for (int level = 0; level < levels; ++level) {
    const double half = side / 2;
    const double mx = x0 + half;
    const double my = y0 + half;
    const int qa = quadrant(a.x, a.y, mx, my);
    const int qb = quadrant(b.x, b.y, mx, my);
    if (qa != qb) return qa < qb ? -1 : 1;
    if (qa & 1) x0 = mx;
    if (qa & 2) y0 = my;
    side = half;
  }
  return 0;
}

// Bit reversal by writing the label as text and reversing the string.
inline std::uint64_t naive_reverse(std::uint64_t label, int bits) {
  std::string s;
  for (int b = bits - 1; b >= 0; --b) s.push_back(((label >> b) & 1U) ? '1' : '0');
  std::uint64_t out = 0;
  for (auto it = s.rbegin(); it != s.rend(); ++it) out = out * 2 + static_cast<std::uint64_t>(*it - '0');
  return out;
}

// Counts prefix violations of the dyadic balance property of a padded
// priority order of length N = 2^m: for each prefix k and each aligned block
// of size N / 2^l, the block holds floor(k / 2^l) or ceil(k / 2^l) entries.
// Per level it keeps a histogram of block counts, so the check after each
// prefix is "how many blocks hold neither value".
inline std::size_t dyadic_balance_violations(const std::vector<std::size_t>& padded) {
  const std::size_t n = padded.size();
  int m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  if ((std::size_t{1} << m) != n) return 1;
  std::size_t violations = 0;
  std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(m) + 1);
  std::vector<std::vector<std::size_t>> hist(static_cast<std::size_t>(m) + 1);
  for (int l = 0; l <= m; ++l) {
    const std::size_t blocks = std::size_t{1} << l;
    counts[static_cast<std::size_t>(l)].assign(blocks, 0);
    hist[static_cast<std::size_t>(l)].assign(n + 2, 0);
    hist[static_cast<std::size_t>(l)][0] = blocks;
  }
  std::vector<std::uint8_t> seen(n, 0);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t label = padded[k - 1];
    if (label >= n || seen[label]) return violations + 1;
    seen[label] = 1;
    for (int l = 0; l <= m; ++l) {
      auto& c = counts[static_cast<std::size_t>(l)][label >> (m - l)];
      auto& h = hist[static_cast<std::size_t>(l)];
      --h[c];
      ++c;
      ++h[c];
      const std::size_t blocks = std::size_t{1} << l;
      const std::size_t lo = k / blocks;
      const std::size_t hi = (k + blocks - 1) / blocks;
      const std::size_t ok = lo == hi ? h[lo] : h[lo] + h[hi];
      violations += blocks - ok;
    }
  }
  return violations;
}

// Long-double summation over the points, evaluated from pixel-center
// coordinates recomputed from the extent.
inline double brute_kde(const std::vector<NormalizedPoint>& pts, double qx, double qy, double sigma) {
  long double sum = 0.0L;
  for (const auto& p : pts) {
    const long double dx = static_cast<long double>(p.x) - qx;
    const long double dy = static_cast<long double>(p.y) - qy;
    sum += std::exp(-(dx * dx + dy * dy) / (static_cast<long double>(sigma) * sigma));
  }
  return static_cast<double>(sum / static_cast<long double>(pts.size()));
}

// Pairwise definition of the de-noising rule over every pixel pair.
inline std::vector<std::uint8_t> brute_denoise(const DensityRaster& r, double threshold, double radius) {
  const GridSpec& g = r.grid;
  std::vector<std::uint8_t> kept(g.pixel_count(), 0);
  for (int j = 0; j < g.height; ++j) {
    for (int i = 0; i < g.width; ++i) {
      for (int jj = 0; jj < g.height && !kept[g.index(i, j)]; ++jj) {
        for (int ii = 0; ii < g.width; ++ii) {
          if (r.at(ii, jj) >= threshold && g.offset_distance_sq(i - ii, j - jj) <= radius * radius) {
            kept[g.index(i, j)] = 1;
            break;
          }
        }
      }
    }
  }
  return kept;
}

}  // namespace kdcs::testing
