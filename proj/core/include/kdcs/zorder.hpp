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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace kdcs {

inline constexpr int kDefaultBitsPerAxis = 31;
inline constexpr int kMaxBitsPerAxis = 31;

// A point of the unit square. Producers (ingest) guarantee 0 <= x, y <= 1.
struct NormalizedPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NormalizedPoint&, const NormalizedPoint&) = default;
};

// Interleaved quantized coordinates: x bits at even positions (bit 0 is the
// x LSB), y bits at odd positions. Ascending code order visits quadrants as
// lower-left, lower-right, upper-left, upper-right, recursively.
struct MortonCode {
  std::uint64_t bits = 0;

  friend auto operator<=>(const MortonCode&, const MortonCode&) = default;
};

std::uint64_t interleave(std::uint32_t x, std::uint32_t y) noexcept;
std::pair<std::uint32_t, std::uint32_t> deinterleave(std::uint64_t code) noexcept;

// floor(coord * 2^bits) clamped to 2^bits - 1. Throws DomainError when coord
// is outside [0,1] (NaN included) or bits is outside [1, 31].
std::uint32_t quantize(double coord, int bits_per_axis);

MortonCode morton_encode(NormalizedPoint p, int bits_per_axis = kDefaultBitsPerAxis);

// Indices of `points` sorted ascending by Morton code; equal codes keep input
// order.
std::vector<std::size_t> zorder_sort(std::span<const NormalizedPoint> points,
                                     int bits_per_axis = kDefaultBitsPerAxis);

}  // namespace kdcs
