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

#include "kdcs/zorder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdcs/error.hpp"

namespace kdcs {
namespace {

std::uint64_t spread_bits(std::uint32_t v) noexcept {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
  x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

std::uint32_t compact_bits(std::uint64_t x) noexcept {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x >> 4)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x >> 8)) & 0x0000ffff0000ffffULL;
  x = (x | (x >> 16)) & 0x00000000ffffffffULL;
  return static_cast<std::uint32_t>(x);
}

void check_bits(int bits_per_axis) {
  if (bits_per_axis < 1 || bits_per_axis > kMaxBitsPerAxis) {
    throw DomainError("bits_per_axis must be in [1, 31], got " + std::to_string(bits_per_axis));
  }
}

}  // namespace

std::uint64_t interleave(std::uint32_t x, std::uint32_t y) noexcept {
  return spread_bits(x) | (spread_bits(y) << 1);
}

std::pair<std::uint32_t, std::uint32_t> deinterleave(std::uint64_t code) noexcept {
  return {compact_bits(code), compact_bits(code >> 1)};
}

std::uint32_t quantize(double coord, int bits_per_axis) {
  check_bits(bits_per_axis);
  if (!(coord >= 0.0 && coord <= 1.0)) {
    throw DomainError("coordinate outside [0,1]: " + std::to_string(coord));
  }
  const double cells = std::ldexp(1.0, bits_per_axis);
  const auto max_cell = static_cast<std::uint32_t>((std::uint64_t{1} << bits_per_axis) - 1);
  const double scaled = std::floor(coord * cells);
  return scaled >= static_cast<double>(max_cell) ? max_cell : static_cast<std::uint32_t>(scaled);
}

MortonCode morton_encode(NormalizedPoint p, int bits_per_axis) {
  return MortonCode{interleave(quantize(p.x, bits_per_axis), quantize(p.y, bits_per_axis))};
}

std::vector<std::size_t> zorder_sort(std::span<const NormalizedPoint> points, int bits_per_axis) {
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    keyed[i] = {morton_encode(points[i], bits_per_axis).bits, i};
  }
  // (code, index) pairs are distinct, so an unstable sort is deterministic
  // and still orders ties by input index.
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order(points.size());
  std::transform(keyed.begin(), keyed.end(), order.begin(), [](const auto& kv) { return kv.second; });
  return order;
}

}  // namespace kdcs
