// Copyright 2026 The crossdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crossdet/cli.hpp"
#include "crossdet/harmonize.hpp"
#include "crossdet/ingest.hpp"
#include "crossdet/simulate.hpp"

namespace fs = std::filesystem;
using crossdet::cli::run;

namespace
{

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string> & args)
{
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
      (std::string("crossdet_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override {fs::remove_all(dir_);}

  std::string write(const std::string & name, const std::string & content) const
  {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

  static std::string slurp(const fs::path & p)
  {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

const char * kGt =
  "000001 Car 10 0 0.75 4.0 1.8 1.5 0.0\n"
  "000001 Car 20 5 0.75 4.2 1.7 1.6 0.3\n"
  "000002 Car 40 -10 0.8 3.9 1.6 1.6 1.2\n";

std::string with_scores(const std::string & gt)
{
  std::istringstream in(gt);
  std::string line;
  std::string out;
  double score = 0.9;
  while (std::getline(in, line)) {
    out += line + " " + std::to_string(score) + "\n";
    score -= 0.1;
  }
  return out;
}

}  // namespace

TEST_F(CliTest, PerfectPredictionsScoreOneHundredEverywhere)
{
  const auto gt = write("gt.txt", kGt);
  const auto pred = write("pred.txt", with_scores(kGt));
  const Result r = invoke({"evaluate", "--gt", gt, "--pred", pred, "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream rows(r.out);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "metric,difficulty,ap,gt_count,prediction_count");
  int n = 0;
  while (std::getline(rows, line)) {
    EXPECT_NE(line.find(",100,"), std::string::npos) << line;
    ++n;
  }
  EXPECT_EQ(n, 21);
}

TEST_F(CliTest, DimensionMetricsSelectThreeRows)
{
  const auto gt = write("gt.txt", kGt);
  const auto pred = write("pred.txt", with_scores(kGt));
  const Result r =
    invoke({"evaluate", "--gt", gt, "--pred", pred, "--metrics", "dim", "--dim-iou", "0.85"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("length"), std::string::npos);
  EXPECT_NE(r.out.find("width"), std::string::npos);
  EXPECT_NE(r.out.find("height"), std::string::npos);
  EXPECT_EQ(r.out.find("bev"), std::string::npos);
  EXPECT_EQ(r.out.find("3d"), std::string::npos);
}

TEST_F(CliTest, OutFileGetsCsvWhileStdoutGetsTable)
{
  const auto gt = write("gt.txt", kGt);
  const auto pred = write("pred.txt", with_scores(kGt));
  const fs::path report = dir_ / "report.csv";
  const Result r = invoke({"evaluate", "--gt", gt, "--pred", pred, "--out", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("metric  ", 0), 0U);
  const auto rows = crossdet::ingest::parse_report_csv(slurp(report));
  EXPECT_EQ(rows.size(), 21U);
}

TEST_F(CliTest, MalformedPredictionLineReportsLineNumber)
{
  const auto gt = write("gt.txt", kGt);
  std::string pred = with_scores(std::string(kGt) + kGt);
  pred += "000002 Car 1 2 three 4 5 6 0 0.5\n";
  const auto path = write("pred.txt", pred);
  const Result r = invoke({"evaluate", "--gt", gt, "--pred", path});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingFileIsAnIoError)
{
  const auto gt = write("gt.txt", kGt);
  const Result r = invoke({"evaluate", "--gt", gt, "--pred", (dir_ / "nope.txt").string()});
  EXPECT_EQ(r.code, 5);
}

TEST_F(CliTest, PredictionFramesWithoutGroundTruthAreAMismatch)
{
  const auto gt = write("gt.txt", kGt);
  const auto pred = write("pred.txt", "999999 Car 1 2 0.75 4 1.8 1.5 0 0.5\n");
  const Result r = invoke({"evaluate", "--gt", gt, "--pred", pred});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("999999"), std::string::npos);
}

TEST_F(CliTest, BadFlagValuesAreUsageErrors)
{
  EXPECT_EQ(invoke({"simulate", "--source", "mars"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--alpha", "2"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--recall-points", "12"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"evaluate", "--gt", "x"}).code, 2);
}

TEST_F(CliTest, SimulateIsByteDeterministic)
{
  const std::vector<std::string> args{"simulate", "--frames", "30", "--seed", "7"};
  const Result a = invoke(args);
  const Result b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Result c = invoke({"simulate", "--frames", "30", "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, ExportedFramesReevaluateToTheSameReport)
{
  const Result sim = invoke(
    {"simulate", "--frames", "25", "--export-dir", dir_.string(), "--format", "csv"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const Result eval = invoke(
    {"evaluate", "--gt", (dir_ / "gt.txt").string(), "--pred", (dir_ / "pred.txt").string(),
      "--format", "csv"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const std::string report = sim.out.substr(sim.out.find("metric,difficulty"));
  EXPECT_EQ(report, eval.out);

  const auto kv = crossdet::harmonize::parse_key_values(slurp(dir_ / "sim.cfg"));
  const auto cfg = crossdet::simulate::sim_config_from(kv);
  EXPECT_EQ(cfg.frames, 25);
  EXPECT_EQ(cfg.seed, 42U);
}

TEST_F(CliTest, HarmonizeClipsCloudsAndShiftsLabels)
{
  using crossdet::ingest::PointCloud;
  const PointCloud cloud{{0.0F, 0.0F, -1.0F, 0.2F}, {80.0F, 0.0F, 0.0F, 0.3F}};
  crossdet::ingest::write_file(dir_ / "scan.bin", crossdet::ingest::write_pointcloud(cloud));
  const auto gt = write("gt_in.txt", std::string(kGt) + "000003 Pedestrian 1 1 0.9 0.8 0.6 1.8 0\n");
  const fs::path out = dir_ / "out";
  fs::create_directories(out);
  const Result r = invoke(
    {"harmonize", "--gt", gt, "--cloud", (dir_ / "scan.bin").string(), "--shift-z", "1.6",
      "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto clipped =
    crossdet::ingest::read_pointcloud(crossdet::ingest::read_binary_file(out / "scan.bin"));
  ASSERT_EQ(clipped.size(), 1U);
  EXPECT_FLOAT_EQ(clipped[0].z, 0.6F);

  const auto labels = crossdet::ingest::parse_canonical(slurp(out / "gt.txt"));
  const auto frames = crossdet::ingest::to_gt_frames(labels);
  EXPECT_EQ(frames.size(), 2U);
  EXPECT_NEAR(frames.at("000001")[0].box.cz, 0.75 + 1.6, 1e-12);
  EXPECT_TRUE(fs::exists(out / "harmonize.cfg"));
}

TEST_F(CliTest, StatsReportsReferenceGap)
{
  const Result r = invoke({"stats", "--source", "waymo", "--target", "kitti"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(
    r.out.find("width +30.2%  height +17.0%  length +23.4%"), std::string::npos) << r.out;
}

TEST_F(CliTest, StatsOnFileWithoutCarsFails)
{
  const auto empty = write("empty.txt", "# nothing here\n");
  const Result r = invoke({"stats", "--gt", empty});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("empty input"), std::string::npos) << r.err;
}

TEST_F(CliTest, HelpShowsDefaultsAndSucceeds)
{
  const Result r = invoke({"simulate", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.85"), std::string::npos);
  EXPECT_NE(r.out.find("30,70,70"), std::string::npos);
  EXPECT_NE(r.out.find("[0.7]"), std::string::npos);
  EXPECT_NE(r.out.find("[40]"), std::string::npos);
}
