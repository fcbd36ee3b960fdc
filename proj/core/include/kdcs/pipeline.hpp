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
#include <vector>

#include "kdcs/dataset_io.hpp"
#include "kdcs/kde.hpp"
#include "kdcs/ordering.hpp"

namespace kdcs {

// Maps a rank-space ordering onto source indices: out[i] = zorder[perm[i]].
std::vector<std::size_t> compose_with_zorder(const PriorityOrdering& ordering, std::span<const std::size_t> zorder);

// normalize -> Z-order sort -> priority reorder. The returned dataset holds
// the original coordinates in priority order.
PriorityDataset prioritize(const PointSet& points, OrderingMethod method, std::uint64_t seed,
                           std::optional<std::uint64_t> mask = std::nullopt,
                           int bits_per_axis = kDefaultBitsPerAxis);

// Normalized coordinates of the first k points of a priority-ordered dataset.
std::vector<NormalizedPoint> prefix_points(const PriorityDataset& dataset, std::size_t k);

struct CompareOptions {
  std::vector<std::size_t> sizes;
  int trials = 10;
  KernelParams kernel{};
  GridSpec grid{};
  std::uint64_t seed = 1;
  OrderingMethod method = OrderingMethod::bit_reversal;
  int bits_per_axis = kDefaultBitsPerAxis;
};

struct CompareRow {
  std::size_t size = 0;
  double rs_error = 0.0;       // median L-infinity over trials
  double coreset_error = 0.0;  // median L-infinity over trials
  std::vector<double> rs_trials;
  std::vector<double> coreset_trials;
};

// For every size: `trials` random samples and `trials` freshly seeded priority
// orderings (new mask per trial for bit reversal), each measured against the
// full-data raster on the same grid.
std::vector<CompareRow> compare_coreset_vs_rs(const PointSet& points, const CompareOptions& options);

enum class SampleKind : std::uint8_t { coreset, random_sample };

struct CalibrationOptions {
  CoresetSpec spec{0.01, 0.1};  // c_coreset / c_rs are ignored
  int trials = 20;
  KernelParams kernel{};
  GridSpec grid{64, 64, {}};
  std::uint64_t seed = 1;
  OrderingMethod method = OrderingMethod::bit_reversal;
  int iterations = 24;
};

struct CalibrationResult {
  double constant = 0.0;
  std::size_t size = 0;
  double success_rate = 0.0;
};

// Fraction of trials whose L-infinity error against the full raster is at
// most spec.eps, for subsets of exactly `size` points.
double success_rate(const PointSet& points, SampleKind kind, std::size_t size, const CalibrationOptions& options);

// Smallest constant (log-scale bisection) whose size formula reaches a
// success rate of at least 1 - delta. Sizes are capped at the dataset size.
CalibrationResult calibrate_size_constant(const PointSet& points, SampleKind kind, const CalibrationOptions& options);

double median(std::vector<double> values);

}  // namespace kdcs
