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

#include "kdcs/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "kdcs/error.hpp"

namespace kdcs {

void KernelParams::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DomainError("kernel bandwidth must be positive and finite");
  }
}

void GridSpec::validate() const {
  if (width < 1 || height < 1) throw DomainError("grid dimensions must be >= 1");
  if (!(extent.width() > 0.0) || !(extent.height() > 0.0) || !std::isfinite(extent.width()) ||
      !std::isfinite(extent.height())) {
    throw DomainError("grid extent is degenerate");
  }
}

double DensityRaster::max_value() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double kde_eval(std::span<const NormalizedPoint> points, NormalizedPoint x, const KernelParams& kernel) {
  kernel.validate();
  if (points.empty()) throw DomainError("kde of an empty point set");
  const double inv_s2 = 1.0 / (kernel.bandwidth * kernel.bandwidth);
  double sum = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - x.x;
    const double dy = p.y - x.y;
    sum += std::exp(-(dx * dx + dy * dy) * inv_s2);
  }
  return sum / static_cast<double>(points.size());
}

double cutoff_radius(const KernelParams& kernel, double tail_eps) {
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw DomainError("tail_eps must be in (0,1)");
  return kernel.bandwidth * std::sqrt(std::log(1.0 / tail_eps));
}

DensityRaster kde_raster_exact(std::span<const NormalizedPoint> points, const GridSpec& grid,
                               const KernelParams& kernel) {
  grid.validate();
  kernel.validate();
  if (points.empty()) throw DomainError("kde of an empty point set");
  DensityRaster out{grid, std::vector<double>(grid.pixel_count()), kernel, points.size()};
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      out.values[grid.index(i, j)] = kde_eval(points, {grid.center_x(i), grid.center_y(j)}, kernel);
    }
  }
  return out;
}

namespace {

// Pixel index range [lo, hi) whose centers lie within `radius` of `c`.
std::pair<int, int> pixel_span(double c, double radius, double origin, double pitch, int count) {
  const double lo = std::ceil((c - radius - origin) / pitch - 0.5);
  const double hi = std::floor((c + radius - origin) / pitch - 0.5) + 1.0;
  const int a = static_cast<int>(std::clamp(lo, 0.0, static_cast<double>(count)));
  const int b = static_cast<int>(std::clamp(hi, 0.0, static_cast<double>(count)));
  return {a, std::max(a, b)};
}

// Accumulates every point into rows [row_begin, row_end). Points are visited
// in input order, so each pixel's sum is independent of the row partition.
void accumulate_rows(std::span<const NormalizedPoint> points, const GridSpec& grid, double inv_s2,
                     double radius, int row_begin, int row_end, std::vector<double>& sums) {
  std::vector<double> wx(static_cast<std::size_t>(grid.width));
  std::vector<double> wy(static_cast<std::size_t>(grid.height));
  const double px = grid.pitch_x();
  const double py = grid.pitch_y();
  for (const auto& p : points) {
    auto [j0, j1] = pixel_span(p.y, radius, grid.extent.min_y, py, grid.height);
    j0 = std::max(j0, row_begin);
    j1 = std::min(j1, row_end);
    if (j0 >= j1) continue;
    const auto [i0, i1] = pixel_span(p.x, radius, grid.extent.min_x, px, grid.width);
    if (i0 >= i1) continue;
    for (int i = i0; i < i1; ++i) {
      const double dx = grid.center_x(i) - p.x;
      wx[static_cast<std::size_t>(i)] = std::exp(-dx * dx * inv_s2);
    }
    for (int j = j0; j < j1; ++j) {
      const double dy = grid.center_y(j) - p.y;
      wy[static_cast<std::size_t>(j)] = std::exp(-dy * dy * inv_s2);
    }
    for (int j = j0; j < j1; ++j) {
      double* row = sums.data() + grid.index(0, j);
      const double w = wy[static_cast<std::size_t>(j)];
      for (int i = i0; i < i1; ++i) row[i] += w * wx[static_cast<std::size_t>(i)];
    }
  }
}

}  // namespace

DensityRaster kde_raster(std::span<const NormalizedPoint> points, const GridSpec& grid,
                         const KernelParams& kernel, const KdeOptions& options) {
  grid.validate();
  kernel.validate();
  if (points.empty()) throw DomainError("kde of an empty point set");
  const double radius = cutoff_radius(kernel, options.tail_eps);
  const double inv_s2 = 1.0 / (kernel.bandwidth * kernel.bandwidth);

  DensityRaster out{grid, std::vector<double>(grid.pixel_count(), 0.0), kernel, points.size()};
  unsigned threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.height));

  if (threads <= 1) {
    accumulate_rows(points, grid, inv_s2, radius, 0, grid.height, out.values);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const int begin = static_cast<int>(static_cast<long>(grid.height) * t / threads);
      const int end = static_cast<int>(static_cast<long>(grid.height) * (t + 1) / threads);
      workers.emplace_back([&, begin, end] {
        accumulate_rows(points, grid, inv_s2, radius, begin, end, out.values);
      });
    }
  }

  const double n = static_cast<double>(points.size());
  for (double& v : out.values) v /= n;
  return out;
}

ErrorReport error_report(const DensityRaster& full, const DensityRaster& approx,
                         std::optional<double> rel_floor) {
  if (!(full.grid == approx.grid)) throw DomainError("error_report: grids differ");
  if (!(full.kernel == approx.kernel)) throw DomainError("error_report: kernels differ");
  if (full.values.size() != full.grid.pixel_count() || approx.values.size() != full.values.size()) {
    throw DomainError("error_report: raster size does not match its grid");
  }
  ErrorReport report;
  report.grid = full.grid;
  report.rel_floor = rel_floor ? *rel_floor : kDefaultFloorFraction * full.max_value();
  const std::size_t n = full.values.size();
  report.abs_error.resize(n);
  report.rel_error.resize(n);
  report.rel_valid.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double diff = full.values[p] - approx.values[p];
    report.abs_error[p] = diff;
    report.linf = std::max(report.linf, std::abs(diff));
    // A zero full value is never a valid denominator, even with a zero floor.
    if (full.values[p] >= report.rel_floor && full.values[p] > 0.0) {
      report.rel_error[p] = diff / full.values[p];
      report.rel_valid[p] = 1;
    } else {
      report.rel_error[p] = std::numeric_limits<double>::quiet_NaN();
      ++report.masked_count;
    }
  }
  return report;
}

std::vector<NormalizedPoint> gather(std::span<const NormalizedPoint> points,
                                    std::span<const std::size_t> indices) {
  std::vector<NormalizedPoint> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= points.size()) throw DomainError("gather: index out of range");
    out.push_back(points[idx]);
  }
  return out;
}

}  // namespace kdcs
