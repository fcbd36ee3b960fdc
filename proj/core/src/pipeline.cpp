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

#include "kdcs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kdcs/error.hpp"
#include "kdcs/random.hpp"
#include "kdcs/zorder.hpp"

namespace kdcs {

std::vector<std::size_t> compose_with_zorder(const PriorityOrdering& ordering, std::span<const std::size_t> zorder) {
  if (zorder.size() != ordering.source_count) throw DomainError("ordering and Z-order sizes differ");
  std::vector<std::size_t> out(ordering.permutation.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = zorder[ordering.permutation[i]];
  return out;
}

PriorityDataset prioritize(const PointSet& points, OrderingMethod method, std::uint64_t seed,
                           std::optional<std::uint64_t> mask, int bits_per_axis) {
  const auto normalized = points.normalized();
  const auto zorder = zorder_sort(normalized, bits_per_axis);
  const auto ordering = make_priority_ordering(points.size(), method, seed, mask);
  const auto source = compose_with_zorder(ordering, zorder);

  std::vector<Point> ordered;
  ordered.reserve(points.size());
  for (std::size_t idx : source) ordered.push_back(points.points[idx]);
  PriorityDataset ds;
  ds.points = PointSet::from_points(std::move(ordered));
  ds.bits_per_axis = static_cast<std::uint32_t>(bits_per_axis);
  ds.method = method;
  ds.seed = seed;
  ds.mask = ordering.mask;
  ds.padded_count = ordering.padded_count;
  return ds;
}

std::vector<NormalizedPoint> prefix_points(const PriorityDataset& dataset, std::size_t k) {
  if (k < 1 || k > dataset.points.size()) throw DomainError("k out of range for dataset");
  std::vector<NormalizedPoint> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dataset.points.norm.apply(dataset.points.points[i]);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<CompareRow> compare_coreset_vs_rs(const PointSet& points, const CompareOptions& options) {
  if (options.trials < 1) throw DomainError("trials must be >= 1");
  for (std::size_t k : options.sizes) {
    if (k < 1 || k > points.size()) throw DomainError("comparison size out of range: " + std::to_string(k));
  }
  const auto normalized = points.normalized();
  const auto zorder = zorder_sort(normalized, options.bits_per_axis);
  const auto full = kde_raster(normalized, options.grid, options.kernel);

  std::vector<CompareRow> rows;
  for (std::size_t k : options.sizes) {
    CompareRow row;
    row.size = k;
    for (int t = 0; t < options.trials; ++t) {
      const auto trial = static_cast<std::uint64_t>(t);
      const auto rs = random_sample(points.size(), k, derive_seed(options.seed, 2 * trial));
      const auto rs_raster = kde_raster(gather(normalized, rs), options.grid, options.kernel);
      row.rs_trials.push_back(error_report(full, rs_raster).linf);

      const auto ordering =
          make_priority_ordering(points.size(), options.method, derive_seed(options.seed, 2 * trial + 1));
      const auto prefix = compose_with_zorder(ordering, zorder);
      const auto cs_raster =
          kde_raster(gather(normalized, std::span<const std::size_t>(prefix).first(k)), options.grid, options.kernel);
      row.coreset_trials.push_back(error_report(full, cs_raster).linf);
    }
    row.rs_error = median(row.rs_trials);
    row.coreset_error = median(row.coreset_trials);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

class Calibrator {
 public:
  Calibrator(const PointSet& points, SampleKind kind, const CalibrationOptions& options)
      : options_(options), kind_(kind), normalized_(points.normalized()) {
    if (options.trials < 1) throw DomainError("trials must be >= 1");
    options.spec.validate();
    full_ = kde_raster(normalized_, options.grid, options.kernel);
    if (kind == SampleKind::coreset) {
      const auto zorder = zorder_sort(normalized_);
      for (int t = 0; t < options.trials; ++t) {
        const auto ordering = make_priority_ordering(normalized_.size(), options.method,
                                                     derive_seed(options.seed, 2 * static_cast<std::uint64_t>(t) + 1));
        orders_.push_back(compose_with_zorder(ordering, zorder));
      }
    }
  }

  std::size_t size_for(double c) const {
    CoresetSpec spec = options_.spec;
    spec.c_coreset = spec.c_rs = c;
    const std::size_t k = kind_ == SampleKind::coreset ? coreset_size_for_eps(spec) : random_sample_size_for_eps(spec);
    return std::min(k, normalized_.size());
  }

  double rate(std::size_t k) {
    if (auto it = cache_.find(k); it != cache_.end()) return it->second;
    int ok = 0;
    for (int t = 0; t < options_.trials; ++t) {
      std::vector<std::size_t> picked;
      std::span<const std::size_t> subset;
      if (kind_ == SampleKind::coreset) {
        subset = std::span<const std::size_t>(orders_[static_cast<std::size_t>(t)]).first(k);
      } else {
        picked = random_sample(normalized_.size(), k, derive_seed(options_.seed, 2 * static_cast<std::uint64_t>(t)));
        subset = picked;
      }
      const auto approx = kde_raster(gather(normalized_, subset), options_.grid, options_.kernel);
      if (error_report(full_, approx).linf <= options_.spec.eps) ++ok;
    }
    const double r = static_cast<double>(ok) / options_.trials;
    cache_.emplace(k, r);
    return r;
  }

  bool passes(double c) { return rate(size_for(c)) >= 1.0 - options_.spec.delta; }
  std::size_t point_count() const noexcept { return normalized_.size(); }

 private:
  CalibrationOptions options_;
  SampleKind kind_;
  std::vector<NormalizedPoint> normalized_;
  DensityRaster full_;
  std::vector<std::vector<std::size_t>> orders_;
  std::map<std::size_t, double> cache_;
};

}  // namespace

double success_rate(const PointSet& points, SampleKind kind, std::size_t size, const CalibrationOptions& options) {
  if (size < 1 || size > points.size()) throw DomainError("calibration size out of range");
  return Calibrator(points, kind, options).rate(size);
}

CalibrationResult calibrate_size_constant(const PointSet& points, SampleKind kind, const CalibrationOptions& options) {
  Calibrator cal(points, kind, options);
  double hi = 1.0;
  while (!cal.passes(hi)) {
    if (cal.size_for(hi) >= cal.point_count()) break;  // the full set always passes
    hi *= 2.0;
  }
  double lo = hi;
  while (cal.size_for(lo) > 1 && cal.passes(lo)) lo /= 2.0;
  if (cal.passes(lo)) hi = lo;
  for (int it = 0; it < options.iterations && cal.size_for(lo) < cal.size_for(hi); ++it) {
    const double mid = std::sqrt(lo * hi);
    (cal.passes(mid) ? hi : lo) = mid;
  }
  const std::size_t k = cal.size_for(hi);
  return {hi, k, cal.rate(k)};
}

}  // namespace kdcs
