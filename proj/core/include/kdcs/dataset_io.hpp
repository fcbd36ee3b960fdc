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
#include <filesystem>
#include <string>

#include "kdcs/ingest.hpp"
#include "kdcs/ordering.hpp"

namespace kdcs {

// Priority-ordered dataset file ("KDCS"), all integers little-endian:
//
//   offset  size  field
//   0       4     magic "KDCS"
//   4       4     u32 format version (1)
//   8       8     u64 source_count
//   16      4     u32 bits_per_axis
//   20      1     u8 method (0 = bit_reversal, 1 = tree)
//   21      3     reserved, zero
//   24      8     u64 seed
//   32      8     u64 mask
//   40      16*n  body: (f64 x, f64 y) per point in priority order, original
//                 (pre-normalization) coordinates
inline constexpr std::uint32_t kKdcsVersion = 1;
inline constexpr std::size_t kKdcsHeaderSize = 40;

struct PriorityDataset {
  PointSet points;  // in priority order
  std::uint32_t bits_per_axis = kDefaultBitsPerAxis;
  OrderingMethod method = OrderingMethod::bit_reversal;
  std::uint64_t seed = 0;
  std::uint64_t mask = 0;
  std::size_t padded_count = 0;
};

std::string encode_priority_dataset(const PriorityDataset& dataset);
// Throws FormatError naming the section ("magic", "header", "body") and byte
// offset where decoding failed.
PriorityDataset decode_priority_dataset(const std::string& bytes);

// `ordering.permutation` must index `pointset.points` directly (source
// indices, see compose_with_zorder).
void save_priority_dataset(const PointSet& pointset, const PriorityOrdering& ordering,
                           const std::filesystem::path& path, std::uint32_t bits_per_axis = kDefaultBitsPerAxis);
void save_priority_dataset(const PriorityDataset& dataset, const std::filesystem::path& path);
PriorityDataset load_priority_dataset(const std::filesystem::path& path);

// One "x y" line per point in priority order.
void export_priority_text(const PriorityDataset& dataset, const std::filesystem::path& path);

}  // namespace kdcs
