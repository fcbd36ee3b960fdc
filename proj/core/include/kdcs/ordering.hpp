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
#include <string_view>
#include <vector>

namespace kdcs {

enum class OrderingMethod : std::uint8_t {
  bit_reversal = 0,
  tree = 1,
};

std::string_view to_string(OrderingMethod method) noexcept;
// Accepts "bit_reversal"/"bitrev" and "tree"; throws DomainError otherwise.
OrderingMethod parse_ordering_method(std::string_view name);

// A priority ordering over a Z-order-sorted sequence of `source_count`
// elements. `permutation[i]` is the Z-order rank emitted at priority i, so
// every prefix of `permutation` is a coreset of the sorted data.
struct PriorityOrdering {
  std::size_t source_count = 0;
  std::size_t padded_count = 0;  // 2^m >= source_count
  std::vector<std::size_t> permutation;
  std::uint64_t seed = 0;
  std::uint64_t mask = 0;  // m-bit XOR mask; 0 for the tree method
  OrderingMethod method = OrderingMethod::bit_reversal;

  int padded_bits() const noexcept;
};

// Error target and failure probability with the hidden constants of the
// O(.) size bounds.
struct CoresetSpec {
  double eps = 0.01;
  double delta = 0.1;
  double c_coreset = 1.0;
  double c_rs = 1.0;

  void validate() const;
};

// ceil(c_coreset * (1/eps) * ln(1/eps)^2.5 * ln(1/delta)), at least 1.
std::size_t coreset_size_for_eps(const CoresetSpec& spec);
// ceil(c_rs * (1/eps^2) * ln(1/delta)), at least 1.
std::size_t random_sample_size_for_eps(const CoresetSpec& spec);

// Smallest m with 2^m >= n (n >= 1).
int padded_bits_for(std::size_t n);

// Reverses the low `bits` bits of `value`.
std::uint64_t reverse_bits(std::uint64_t value, int bits) noexcept;

// Full padded priority order for the bit-reversal method: entry i is the
// padded label (0..N-1) ranked i-th by reverse(label) XOR mask. Labels >= n
// are the trailing dummies.
std::vector<std::size_t> bit_reverse_padded_order(std::size_t n, std::uint64_t mask);

// Bit-reversal priority ordering with dummies stripped. When `mask` is empty
// an m-bit mask is drawn from `seed`. A supplied mask must fit in m bits.
PriorityOrdering bit_reverse_permute(std::size_t n, std::optional<std::uint64_t> mask,
                                     std::uint64_t seed);

// Full padded selection order of the balanced-tree method, dummies included.
std::vector<std::size_t> tree_padded_order(std::size_t n, std::uint64_t seed);

// Balanced binary tree priority reordering with dummies stripped.
PriorityOrdering tree_priority_reorder(std::size_t n, std::uint64_t seed);

PriorityOrdering make_priority_ordering(std::size_t n, OrderingMethod method, std::uint64_t seed,
                                        std::optional<std::uint64_t> mask = std::nullopt);

// First k entries of the ordering; 1 <= k <= source_count.
std::span<const std::size_t> extract_coreset(const PriorityOrdering& ordering, std::size_t k);

// One uniformly random rank from each of the k half-open rank ranges
// [round((i-1)n/k), round(i n/k)). Returns ranks in range order.
std::vector<std::size_t> zorder_block_coreset(std::size_t n, std::size_t k, std::uint64_t seed);

// k distinct indices from [0, n), uniform without replacement, in draw order.
std::vector<std::size_t> random_sample(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace kdcs
