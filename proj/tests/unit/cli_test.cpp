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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli/commands.hpp"
#include "kdcs/dataset_io.hpp"
#include "kdcs/denoise.hpp"
#include "kdcs/ingest.hpp"
#include "kdcs/random.hpp"
#include "kdcs/raster_io.hpp"

namespace kdcs::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;

  // key=value lines of stdout.
  std::map<std::string, std::string> kv() const {
    std::map<std::string, std::string> m;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos && line.find(' ') == std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
  }
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("kdcs_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "kdcs");
    std::ostringstream out;
    std::ostringstream err;
    Outcome o;
    o.code = run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  void write(const std::string& name, const std::string& body) const { std::ofstream(dir_ / name) << body; }

  // Gaussian cluster with one far singleton at (0.9, 0.9).
  std::string planted(std::size_t n) const {
    Rng rng(5);
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < n; ++i) s << 0.3 + 0.05 * rng.normal() << ' ' << 0.3 + 0.05 * rng.normal() << '\n';
    s << "0 0\n1 1\n0.9 0.9\n";
    write("planted.txt", s.str());
    return path("planted.txt");
  }

  fs::path dir_;
};

TEST_F(CliTest, OrderReproducesWorkedExample) {
  write("seven.txt", "0 0\n1 0\n2 0\n3 0\n4 0\n5 0\n6 0\n");
  auto o = cli({"order", "-i", path("seven.txt"), "-o", path("seven.kdcs"), "--mask", "0b101", "--text",
                path("seven_order.txt")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto kv = o.kv();
  EXPECT_EQ(kv.at("source_count"), "7");
  EXPECT_EQ(kv.at("padded_count"), "8");
  EXPECT_EQ(kv.at("mask"), "5");
  EXPECT_EQ(kv.at("method"), "bit_reversal");
  const auto ds = load_priority_dataset(path("seven.kdcs"));
  std::vector<double> xs;
  for (const auto& p : ds.points.points) xs.push_back(p.x);
  EXPECT_EQ(xs, (std::vector<double>{5, 1, 3, 4, 0, 6, 2}));
  EXPECT_EQ(slurp(path("seven_order.txt")), "5 0\n1 0\n3 0\n4 0\n0 0\n6 0\n2 0\n");

  ASSERT_EQ(cli({"order", "-i", path("seven.txt"), "-o", path("again.kdcs"), "--mask", "0x5"}).code, 0);
  EXPECT_EQ(slurp(path("seven.kdcs")), slurp(path("again.kdcs")));
}

TEST_F(CliTest, SynthOrderExtractRaster) {
  auto o = cli({"synth", "--depth", "2", "--scale", "3", "--seed", "1", "-o", path("s.txt")});
  ASSERT_EQ(o.code, 0) << o.err;
  const std::size_t n = std::stoul(o.kv().at("count"));
  EXPECT_EQ(n, synth_count(2, 3.0));

  ASSERT_EQ(cli({"order", "-i", path("s.txt"), "-o", path("s.kdcs"), "--method", "tree", "--seed", "7"}).code, 0);
  o = cli({"extract", "-i", path("s.kdcs"), "-o", path("k.txt"), "-k", "25"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(load_points(path("k.txt"), TextFormat::whitespace).set.size(), 25U);

  o = cli({"extract", "-i", path("s.kdcs"), "-o", path("e.txt"), "--eps", "0.3", "--delta", "0.5"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.kv().at("k_from_eps"), o.kv().at("k"));

  o = cli({"raster", "-i", path("s.kdcs"), "-o", path("r"), "--width", "40", "--height", "30", "--sigma", "0.05"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.kv().at("k"), std::to_string(n));
  EXPECT_EQ(o.kv().at("max"), o.kv().at("reference_max"));
  const auto r = read_raster(path("r"));
  EXPECT_EQ(r.grid.width, 40);
  EXPECT_EQ(r.grid.height, 30);
  const auto png = read_png(path("r.png"));
  EXPECT_EQ(png.width, 40);
  EXPECT_EQ(png.height, 30);

  o = cli({"raster", "-i", path("s.kdcs"), "-o", path("r10"), "-k", "10", "--width", "16", "--height", "16",
           "--no-png"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_FALSE(fs::exists(path("r10.png")));
  EXPECT_EQ(read_raster(path("r10")).source_size, 10U);
}

TEST_F(CliTest, CompareTableIsDeterministic) {
  ASSERT_EQ(cli({"synth", "--depth", "3", "--scale", "4", "-o", path("s.txt")}).code, 0);
  ASSERT_EQ(cli({"order", "-i", path("s.txt"), "-o", path("s.kdcs")}).code, 0);
  const std::vector<std::string> args{"compare", "-i", path("s.kdcs"), "--sizes", "50,100,200,400", "--trials", "3",
                                      "--width", "32", "--height", "32", "--sigma", "0.05", "--json", path("c.json")};
  auto a = cli(args);
  auto b = cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("Size"), std::string::npos);
  EXPECT_NE(a.out.find("RS Err"), std::string::npos);
  EXPECT_NE(a.out.find("Coreset Err"), std::string::npos);
  std::size_t rows = 0;
  std::istringstream in(a.out);
  for (std::string line; std::getline(in, line);) rows += line.rfind("size=", 0) == 0;
  EXPECT_EQ(rows, 4U);
  EXPECT_TRUE(fs::exists(path("c.json")));
}

TEST_F(CliTest, DenoiseModes) {
  ASSERT_EQ(cli({"order", "-i", planted(3000), "-o", path("p.kdcs")}).code, 0);
  const std::vector<std::string> grid{"--width", "48", "--height", "48", "--sigma", "0.02"};

  auto args = std::vector<std::string>{"denoise", "-i", path("p.kdcs"), "--percentage", "0.999999"};
  args.insert(args.end(), grid.begin(), grid.end());
  auto o = cli(args);
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.err.find("every pixel suppressed"), std::string::npos);

  args = {"denoise", "-i", path("p.kdcs"), "--percentage", "1", "--reference-max", "1e9"};
  args.insert(args.end(), grid.begin(), grid.end());
  o = cli(args);
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.err.find("every pixel suppressed"), std::string::npos);
  EXPECT_EQ(o.kv().at("kept"), "0");

  args = {"raster", "-i", path("p.kdcs"), "-o", path("full"), "--no-png"};
  args.insert(args.end(), grid.begin(), grid.end());
  ASSERT_EQ(cli(args).code, 0);
  const auto full = read_raster(path("full"));
  o = cli({"denoise", "--raster", path("full"), "--percentage", "0.3", "--radius", "0", "-o", path("thr")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto thr = read_raster(path("thr"));
  const double t = 0.3 * full.max_value();
  for (std::size_t p = 0; p < full.values.size(); ++p) {
    EXPECT_EQ(thr.values[p], full.values[p] >= t ? full.values[p] : 0.0);
  }
  EXPECT_TRUE(fs::exists(path("thr.png")));

  // The singleton sits at normalized (0.9, 0.9).
  o = cli({"denoise", "--raster", path("full"), "--region", "disc:0.9,0.9,0.05", "-o", path("zap"), "--json",
           path("zap.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto zap = read_raster(path("zap"));
  const auto region = RegionSelection::disc(0.9, 0.9, 0.05);
  for (int j = 0; j < zap.grid.height; ++j) {
    for (int i = 0; i < zap.grid.width; ++i) {
      if (region.contains(zap.grid.center_x(i), zap.grid.center_y(j))) EXPECT_EQ(zap.at(i, j), 0.0);
    }
  }
  EXPECT_GT(std::stod(o.kv().at("kept")), 0.0);

  o = cli({"denoise", "--raster", path("full"), "--region", "disc:0.3,0.3,0.05"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("cannot suppress"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"order", "-i", path("missing.txt"), "-o", path("x.kdcs")}).code, 1);
  write("junk.txt", "hello world\n");
  auto o = cli({"order", "-i", path("junk.txt"), "-o", path("x.kdcs")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("no valid points"), std::string::npos);
  write("bad.kdcs", "KDCSxxxx");
  EXPECT_EQ(cli({"raster", "-i", path("bad.kdcs"), "-o", path("r")}).code, 2);
  write("seven.txt", "0 0\n1 0\n2 0\n3 0\n4 0\n5 0\n6 0\n");
  EXPECT_EQ(cli({"order", "-i", path("seven.txt"), "-o", path("x.kdcs"), "--mask", "0b1111"}).code, 2);
  EXPECT_EQ(cli({"order", "-i", path("seven.txt"), "-o", path("x.kdcs"), "--mask", "zz"}).code, 1);
  EXPECT_EQ(cli({"denoise", "--raster", path("r")}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
  write("seven.txt", "0 0\n1 0\n2 0\n3 0\n4 0\n5 0\n6 0\n");
  write("cfg.toml", "[order]\nmask = \"0b101\"\nmethod = \"bit_reversal\"\n");
  auto o = cli({"--config", path("cfg.toml"), "order", "-i", path("seven.txt"), "-o", path("x.kdcs")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.kv().at("mask"), "5");
  o = cli({"--config", path("cfg.toml"), "order", "-i", path("seven.txt"), "-o", path("x.kdcs"), "--mask", "3"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.kv().at("mask"), "3");
}

TEST_F(CliTest, CalibrateWritesConfig) {
  ASSERT_EQ(cli({"synth", "--depth", "2", "--scale", "20", "-o", path("s.txt")}).code, 0);
  ASSERT_EQ(cli({"order", "-i", path("s.txt"), "-o", path("s.kdcs")}).code, 0);
  auto o = cli({"calibrate", "-i", path("s.kdcs"), "--eps", "0.05", "--delta", "0.2", "--trials", "5", "--width",
                "16", "--height", "16", "--sigma", "0.1", "-o", path("cal.toml")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto kv = o.kv();
  EXPECT_GT(std::stod(kv.at("c_coreset")), 0.0);
  EXPECT_GT(std::stod(kv.at("c_rs")), 0.0);
  o = cli({"--config", path("cal.toml"), "extract", "-i", path("s.kdcs"), "-o", path("e.txt"), "--eps", "0.05",
           "--delta", "0.2"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.kv().at("k_from_eps"), kv.at("coreset_size"));
}

TEST_F(CliTest, BenchRuns) {
  auto o = cli({"bench", "--points", "20000", "--grid", "32", "-k", "100"});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* key : {"zorder_sort_ms", "reorder_ms", "raster_ms"}) EXPECT_TRUE(o.kv().count(key)) << key;
}

}  // namespace
}  // namespace kdcs::cli
