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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kdcs/dataset_io.hpp"
#include "kdcs/error.hpp"
#include "kdcs/ingest.hpp"
#include "kdcs/pipeline.hpp"
#include "kdcs/random.hpp"

namespace kdcs {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("kdcs_ingest_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

PointSet random_set(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {-84.0 + 3.0 * rng.uniform(), 37.0 + 2.0 * rng.uniform()};
  return PointSet::from_points(std::move(pts));
}

using LoadTest = TempDir;

TEST_F(LoadTest, TwoCorners) {
  const auto r = load_points(write("a.txt", "0 0\n1 1\n"), TextFormat::whitespace);
  ASSERT_EQ(r.set.size(), 2U);
  EXPECT_EQ(r.skipped_lines, 0U);
  const auto n = r.set.normalized();
  EXPECT_EQ(n[0].x, 0.0);
  EXPECT_EQ(n[0].y, 0.0);
  EXPECT_EQ(n[1].x, 1.0);
  EXPECT_EQ(n[1].y, 1.0);
}

TEST_F(LoadTest, SkipsMalformedCommentsAndBlanks) {
  std::ostringstream body;
  body << "# header\n\n";
  for (int i = 0; i < 100; ++i) body << (i == 37 ? "abc def" : std::to_string(i) + "\t" + std::to_string(2 * i)) << '\n';
  const auto r = load_points(write("b.txt", body.str()), TextFormat::whitespace);
  EXPECT_EQ(r.set.size(), 99U);
  EXPECT_EQ(r.skipped_lines, 1U);
  EXPECT_EQ(r.set.points[37], (Point{38.0, 76.0}));
}

TEST_F(LoadTest, CsvAndSwap) {
  const auto r = load_points(write("c.csv", "37.5,-84.25\n38,-83\n"), TextFormat::csv, true);
  ASSERT_EQ(r.set.size(), 2U);
  EXPECT_EQ(r.set.points[0], (Point{-84.25, 37.5}));
  EXPECT_EQ(r.set.points[1], (Point{-83.0, 38.0}));
  EXPECT_EQ(r.set.bbox.min_x, -84.25);
  EXPECT_EQ(r.set.bbox.max_y, 38.0);
}

TEST_F(LoadTest, NoValidPointsIsAnError) {
  EXPECT_THROW(load_points(write("d.txt", "# only\nfoo\n"), TextFormat::whitespace), Error);
  EXPECT_THROW(load_points(dir_ / "missing.txt", TextFormat::whitespace), Error);
}

TEST_F(LoadTest, SaveLoadIsBitExact) {
  const auto set = random_set(500, 3);
  save_points(set.points, dir_ / "e.txt");
  const auto back = load_points(dir_ / "e.txt", TextFormat::whitespace);
  EXPECT_EQ(back.set.points, set.points);
}

TEST(Normalization, LongerSideSpansUnitInterval) {
  const auto set = PointSet::from_points({{10.0, 5.0}, {14.0, 6.0}});
  const auto n = set.normalized();
  EXPECT_DOUBLE_EQ(n[0].x, 0.0);
  EXPECT_DOUBLE_EQ(n[1].x, 1.0);
  EXPECT_DOUBLE_EQ(n[0].y, 0.375);
  EXPECT_DOUBLE_EQ(n[1].y, 0.625);
  EXPECT_DOUBLE_EQ(set.norm.scale(), 0.25);
  const Point back = set.norm.invert(n[1]);
  EXPECT_DOUBLE_EQ(back.x, 14.0);
  EXPECT_DOUBLE_EQ(back.y, 6.0);
}

TEST(Normalization, IdempotentAndInRange) {
  const auto set = random_set(1000, 9);
  const auto n = set.normalized();
  std::vector<Point> again;
  for (const auto& q : n) {
    ASSERT_GE(q.x, 0.0);
    ASSERT_LE(q.x, 1.0);
    ASSERT_GE(q.y, 0.0);
    ASSERT_LE(q.y, 1.0);
    again.push_back({q.x, q.y});
  }
  const auto n2 = PointSet::from_points(again).normalized();
  for (std::size_t i = 0; i < n.size(); ++i) {
    EXPECT_NEAR(n2[i].x, n[i].x, 1e-12);
    EXPECT_NEAR(n2[i].y, n[i].y, 1e-12);
  }
}

TEST(Normalization, DegenerateInputs) {
  const auto single = PointSet::from_points({{3.0, 4.0}});
  const auto n = single.normalized();
  EXPECT_TRUE(n[0].x >= 0.0 && n[0].x <= 1.0);
  EXPECT_THROW(PointSet::from_points({}), DomainError);
  EXPECT_THROW(PointSet::from_points({{std::nan(""), 0.0}}), DomainError);
}

TEST(Synth, DepthOneHasEightCornerAndInteriorPoints) {
  const auto set = synth_generate(1, 0.25, 0);
  ASSERT_EQ(set.size(), 8U);
  const std::set<std::pair<double, double>> got = [&] {
    std::set<std::pair<double, double>> s;
    for (const auto& p : set.points) s.emplace(p.x, p.y);
    return s;
  }();
  const std::set<std::pair<double, double>> expected{{0, 0}, {0, 1}, {1, 0}, {1, 1},
                                                     {0.5, 0.5}, {0.5, 0.8}, {0.8, 0.5}, {0.8, 0.8}};
  EXPECT_EQ(got, expected);
  EXPECT_EQ(synth_count(1, 0.25), 8U);
}

TEST(Synth, DeterministicInUnitSquare) {
  const auto a = synth_generate(3, 2.0, 5);
  const auto b = synth_generate(3, 2.0, 5);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.size(), synth_count(3, 2.0));
  EXPECT_NE(a.points, synth_generate(3, 2.0, 6).points);
  for (const auto& p : a.points) {
    ASSERT_TRUE(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0);
  }
  EXPECT_THROW(synth_generate(0, 1.0, 0), DomainError);
}

TEST(Synth, DefaultPresetHitsTargetCount) {
  const double scale = calibrate_synth_scale(kDefaultSynthDepth, kDefaultSynthCount);
  const auto count = static_cast<double>(synth_count(kDefaultSynthDepth, scale));
  EXPECT_NEAR(count, static_cast<double>(kDefaultSynthCount), 0.1 * kDefaultSynthCount);
}

using KdcsFileTest = TempDir;

TEST_F(KdcsFileTest, RoundTripPreservesOrderAndHeader) {
  const auto set = random_set(777, 4);
  const auto ds = prioritize(set, OrderingMethod::tree, 99);
  save_priority_dataset(ds, dir_ / "a.kdcs");
  EXPECT_EQ(fs::file_size(dir_ / "a.kdcs"), kKdcsHeaderSize + 16 * 777);
  const auto back = load_priority_dataset(dir_ / "a.kdcs");
  EXPECT_EQ(back.points.points, ds.points.points);
  EXPECT_EQ(back.method, OrderingMethod::tree);
  EXPECT_EQ(back.seed, 99U);
  EXPECT_EQ(back.bits_per_axis, 31U);
  EXPECT_EQ(back.padded_count, 1024U);
  std::multiset<std::pair<double, double>> a;
  std::multiset<std::pair<double, double>> b;
  for (const auto& p : set.points) a.emplace(p.x, p.y);
  for (const auto& p : back.points.points) b.emplace(p.x, p.y);
  EXPECT_EQ(a, b);
}

TEST_F(KdcsFileTest, HeaderLayout) {
  const auto set = PointSet::from_points({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  const auto ds = prioritize(set, OrderingMethod::bit_reversal, 7, 2);
  const std::string bytes = encode_priority_dataset(ds);
  ASSERT_EQ(bytes.size(), 40U + 48U);
  EXPECT_EQ(bytes.substr(0, 4), "KDCS");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 3);
  EXPECT_EQ(bytes[16], 31);
  EXPECT_EQ(bytes[20], 0);
  EXPECT_EQ(bytes[24], 7);
  EXPECT_EQ(bytes[32], 2);
  double x = 0.0;
  std::memcpy(&x, bytes.data() + 40, 8);
  EXPECT_EQ(x, ds.points.points[0].x);
}

TEST_F(KdcsFileTest, RejectsCorruptFiles) {
  const auto ds = prioritize(random_set(10, 1), OrderingMethod::bit_reversal, 1);
  const std::string good = encode_priority_dataset(ds);
  auto offset_of = [](const std::string& bytes) {
    try {
      decode_priority_dataset(bytes);
    } catch (const FormatError& e) {
      return static_cast<long>(e.offset());
    }
    return -1L;
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(offset_of(bad_magic), 0);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(offset_of(bad_version), 4);
  std::string bad_method = good;
  bad_method[20] = 5;
  EXPECT_EQ(offset_of(bad_method), 20);
  EXPECT_GE(offset_of(good.substr(0, 30)), 0);
  EXPECT_GE(offset_of(good.substr(0, good.size() - 1)), 0);
  EXPECT_GE(offset_of(good + "x"), 0);
  EXPECT_EQ(offset_of(""), 0);
  EXPECT_EQ(offset_of(good), -1);
}

TEST_F(KdcsFileTest, TextExportMatchesPrefix) {
  const auto ds = prioritize(random_set(64, 2), OrderingMethod::bit_reversal, 5);
  export_priority_text(ds, dir_ / "p.txt");
  const auto back = load_points(dir_ / "p.txt", TextFormat::whitespace);
  EXPECT_EQ(back.set.points, ds.points.points);
  const auto pre = prefix_points(ds, 10);
  const auto norm = ds.points.normalized();
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(pre[i].x, norm[i].x);
    EXPECT_EQ(pre[i].y, norm[i].y);
  }
  EXPECT_THROW(prefix_points(ds, 65), DomainError);
}

TEST(Prioritize, FirstPointsSpreadAcrossQuadrants) {
  const auto set = random_set(4096, 12);
  const auto ds = prioritize(set, OrderingMethod::bit_reversal, 3);
  const auto pre = prefix_points(ds, 16);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& p : pre) ++counts[(p.y >= 0.5 ? 2 : 0) + (p.x >= 0.5 ? 1 : 0)];
  // Each quadrant of the normalized square holds about a quarter of the points.
  for (int c : counts) EXPECT_GE(c, 2);
}

TEST(Calibration, ConstantMeetsTarget) {
  const auto set = synth_generate(3, 30.0, 1);
  CalibrationOptions opt;
  opt.spec = {0.02, 0.2};
  opt.trials = 10;
  opt.grid = GridSpec{32, 32, {}};
  opt.kernel = KernelParams{0.05};
  for (SampleKind kind : {SampleKind::coreset, SampleKind::random_sample}) {
    const auto cal = calibrate_size_constant(set, kind, opt);
    EXPECT_GE(cal.success_rate, 0.8);
    EXPECT_GT(cal.constant, 0.0);
    EXPECT_EQ(success_rate(set, kind, cal.size, opt), cal.success_rate);
    EXPECT_LT(success_rate(set, kind, 1, opt), 0.8);
    EXPECT_GT(cal.size, 1U);
  }
}

}  // namespace
}  // namespace kdcs
