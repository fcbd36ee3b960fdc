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

#include "kdcs/ordering.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

#include "kdcs/error.hpp"
#include "kdcs/random.hpp"

namespace kdcs {

__extension__ using Uint128 = unsigned __int128;
namespace {

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw DomainError("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
}

std::size_t ceil_at_least_one(double v) {
  if (!std::isfinite(v)) throw DomainError("size formula overflowed");
  const double c = std::ceil(v);
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

std::vector<std::size_t> strip_dummies(const std::vector<std::size_t>& padded, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t label : padded) {
    if (label < n) out.push_back(label);
  }
  return out;
}

}  // namespace

std::string_view to_string(OrderingMethod method) noexcept {
  switch (method) {
    case OrderingMethod::bit_reversal:
      return "bit_reversal";
    case OrderingMethod::tree:
      return "tree";
  }
  return "unknown";
}

OrderingMethod parse_ordering_method(std::string_view name) {
  if (name == "bit_reversal" || name == "bitrev") return OrderingMethod::bit_reversal;
  if (name == "tree") return OrderingMethod::tree;
  throw DomainError("unknown ordering method '" + std::string(name) + "'");
}

int PriorityOrdering::padded_bits() const noexcept {
  return padded_count <= 1 ? 0 : std::countr_zero(padded_count);
}

void CoresetSpec::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0,1)");
  if (!(c_coreset > 0.0) || !(c_rs > 0.0)) throw DomainError("size constants must be positive");
}

std::size_t coreset_size_for_eps(const CoresetSpec& spec) {
  spec.validate();
  const double inv = 1.0 / spec.eps;
  return ceil_at_least_one(spec.c_coreset * inv * std::pow(std::log(inv), 2.5) *
                           std::log(1.0 / spec.delta));
}

std::size_t random_sample_size_for_eps(const CoresetSpec& spec) {
  spec.validate();
  return ceil_at_least_one(spec.c_rs / (spec.eps * spec.eps) * std::log(1.0 / spec.delta));
}

int padded_bits_for(std::size_t n) {
  if (n == 0) throw DomainError("ordering requires n >= 1");
  return n == 1 ? 0 : std::bit_width(n - 1);
}

std::uint64_t reverse_bits(std::uint64_t value, int bits) noexcept {
  std::uint64_t out = 0;
  for (int b = 0; b < bits; ++b) {
    out = (out << 1) | ((value >> b) & 1U);
  }
  return out;
}

std::vector<std::size_t> bit_reverse_padded_order(std::size_t n, std::uint64_t mask) {
  const int m = padded_bits_for(n);
  const std::size_t padded = std::size_t{1} << m;
  if (mask >= padded && !(m == 0 && mask == 0)) {
    throw DomainError("mask has more than " + std::to_string(m) + " bits");
  }
  // reverse(label) ^ mask is a bijection onto [0, padded), so sorting by it is
  // a scatter.
  std::vector<std::size_t> order(padded);
  for (std::size_t label = 0; label < padded; ++label) {
    order[reverse_bits(label, m) ^ mask] = label;
  }
  return order;
}

PriorityOrdering bit_reverse_permute(std::size_t n, std::optional<std::uint64_t> mask,
                                     std::uint64_t seed) {
  const int m = padded_bits_for(n);
  const std::size_t padded = std::size_t{1} << m;
  const std::uint64_t used_mask = mask ? *mask : (Rng(seed).next() & (padded - 1));
  PriorityOrdering out;
  out.source_count = n;
  out.padded_count = padded;
  out.permutation = strip_dummies(bit_reverse_padded_order(n, used_mask), n);
  out.seed = seed;
  out.mask = used_mask;
  out.method = OrderingMethod::bit_reversal;
  return out;
}

// Implicit perfect binary tree in heap layout: root 1, leaves padded..2*padded-1.
// marked[c] set means child c has received one more selection than its
// sibling; descending clears it and goes to the sibling, otherwise a fair coin
// picks a side and marks it.
std::vector<std::size_t> tree_padded_order(std::size_t n, std::uint64_t seed) {
  const int m = padded_bits_for(n);
  const std::size_t padded = std::size_t{1} << m;
  std::vector<std::uint8_t> marked(2 * padded, 0);
  std::vector<std::size_t> order;
  order.reserve(padded);
  Rng rng(seed);
  for (std::size_t step = 0; step < padded; ++step) {
    std::size_t node = 1;
    while (node < padded) {
      const std::size_t left = 2 * node;
      const std::size_t right = left + 1;
      if (!marked[left] && !marked[right]) {
        node = rng.coin() ? right : left;
        marked[node] = 1;
      } else if (marked[left]) {
        marked[left] = 0;
        node = right;
      } else {
        marked[right] = 0;
        node = left;
      }
    }
    order.push_back(node - padded);
  }
  return order;
}

PriorityOrdering tree_priority_reorder(std::size_t n, std::uint64_t seed) {
  PriorityOrdering out;
  out.source_count = n;
  out.padded_count = std::size_t{1} << padded_bits_for(n);
  out.permutation = strip_dummies(tree_padded_order(n, seed), n);
  out.seed = seed;
  out.mask = 0;
  out.method = OrderingMethod::tree;
  return out;
}

PriorityOrdering make_priority_ordering(std::size_t n, OrderingMethod method, std::uint64_t seed,
                                        std::optional<std::uint64_t> mask) {
  if (method == OrderingMethod::tree) {
    if (mask && *mask != 0) throw DomainError("the tree method does not take a mask");
    return tree_priority_reorder(n, seed);
  }
  return bit_reverse_permute(n, mask, seed);
}

std::span<const std::size_t> extract_coreset(const PriorityOrdering& ordering, std::size_t k) {
  check_k(k, ordering.source_count);
  return std::span<const std::size_t>(ordering.permutation).first(k);
}

std::vector<std::size_t> zorder_block_coreset(std::size_t n, std::size_t k, std::uint64_t seed) {
  check_k(k, n);
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  // Endpoints round(i*n/k) in exact integer arithmetic: floor((2 i n + k) / 2k).
  auto endpoint = [n, k](std::size_t i) {
    const auto num = static_cast<Uint128>(2) * i * n + k;
    return static_cast<std::size_t>(num / (static_cast<Uint128>(2) * k));
  };
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t end = endpoint(i);
    chosen.push_back(begin + rng.below(end - begin));
    begin = end;
  }
  return chosen;
}

// Partial Fisher-Yates over a virtual identity array; only displaced slots
// are stored.
std::vector<std::size_t> random_sample(std::size_t n, std::size_t k, std::uint64_t seed) {
  check_k(k, n);
  Rng rng(seed);
  std::unordered_map<std::size_t, std::size_t> displaced;
  displaced.reserve(2 * k);
  auto slot = [&displaced](std::size_t i) {
    auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    const std::size_t vi = slot(i);
    const std::size_t vj = slot(j);
    out.push_back(vj);
    displaced[j] = vi;
  }
  return out;
}

}  // namespace kdcs
