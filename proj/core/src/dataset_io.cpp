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

#include "kdcs/dataset_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "byte_order.hpp"
#include "kdcs/error.hpp"

namespace kdcs {

std::string encode_priority_dataset(const PriorityDataset& dataset) {
  std::string out;
  out.reserve(kKdcsHeaderSize + 16 * dataset.points.size());
  out.append("KDCS", 4);
  detail::append_le<std::uint32_t>(out, kKdcsVersion);
  detail::append_le<std::uint64_t>(out, dataset.points.size());
  detail::append_le<std::uint32_t>(out, dataset.bits_per_axis);
  detail::append_le<std::uint8_t>(out, static_cast<std::uint8_t>(dataset.method));
  out.append(3, '\0');
  detail::append_le<std::uint64_t>(out, dataset.seed);
  detail::append_le<std::uint64_t>(out, dataset.mask);
  for (const auto& p : dataset.points.points) {
    detail::append_le(out, p.x);
    detail::append_le(out, p.y);
  }
  return out;
}

PriorityDataset decode_priority_dataset(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 4) throw FormatError("KDCS file truncated in magic", bytes.size());
  if (std::memcmp(p, "KDCS", 4) != 0) throw FormatError("bad magic, not a KDCS file", 0);
  if (bytes.size() < kKdcsHeaderSize) throw FormatError("KDCS file truncated in header", bytes.size());
  const auto version = detail::read_le<std::uint32_t>(p + 4);
  if (version != kKdcsVersion) {
    throw FormatError("unsupported KDCS version " + std::to_string(version), 4);
  }
  const auto count = detail::read_le<std::uint64_t>(p + 8);
  PriorityDataset out;
  out.bits_per_axis = detail::read_le<std::uint32_t>(p + 16);
  if (out.bits_per_axis < 1 || out.bits_per_axis > kMaxBitsPerAxis) {
    throw FormatError("bits_per_axis out of range", 16);
  }
  const auto method = p[20];
  if (method > 1) throw FormatError("unknown ordering method tag " + std::to_string(method), 20);
  out.method = static_cast<OrderingMethod>(method);
  out.seed = detail::read_le<std::uint64_t>(p + 24);
  out.mask = detail::read_le<std::uint64_t>(p + 32);
  if (count == 0) throw FormatError("KDCS file holds no points", 8);
  const std::size_t body = bytes.size() - kKdcsHeaderSize;
  if (count > body / 16) {
    throw FormatError("KDCS file truncated in body: expected " + std::to_string(count) + " points", bytes.size());
  }
  if (body != 16 * count) throw FormatError("trailing bytes after KDCS body", kKdcsHeaderSize + 16 * count);
  std::vector<Point> points(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* q = p + kKdcsHeaderSize + 16 * i;
    points[i] = {detail::read_le<double>(q), detail::read_le<double>(q + 8)};
  }
  try {
    out.points = PointSet::from_points(std::move(points));
  } catch (const DomainError& e) {
    throw FormatError(std::string("KDCS body: ") + e.what(), kKdcsHeaderSize);
  }
  out.padded_count = std::size_t{1} << padded_bits_for(count);
  return out;
}

void save_priority_dataset(const PointSet& pointset, const PriorityOrdering& ordering,
                           const std::filesystem::path& path, std::uint32_t bits_per_axis) {
  if (ordering.permutation.size() != pointset.size()) {
    throw DomainError("ordering does not cover the point set");
  }
  std::vector<Point> ordered;
  ordered.reserve(pointset.size());
  for (std::size_t idx : ordering.permutation) ordered.push_back(pointset.points.at(idx));
  PriorityDataset ds;
  ds.points = PointSet::from_points(std::move(ordered));
  ds.bits_per_axis = bits_per_axis;
  ds.method = ordering.method;
  ds.seed = ordering.seed;
  ds.mask = ordering.mask;
  ds.padded_count = ordering.padded_count;
  save_priority_dataset(ds, path);
}

void save_priority_dataset(const PriorityDataset& dataset, const std::filesystem::path& path) {
  const std::string bytes = encode_priority_dataset(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write error on " + path.string());
}

PriorityDataset load_priority_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_priority_dataset(bytes);
}

void export_priority_text(const PriorityDataset& dataset, const std::filesystem::path& path) {
  save_points(dataset.points.points, path);
}

}  // namespace kdcs
