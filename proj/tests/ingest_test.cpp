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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "crossdet/errors.hpp"
#include "crossdet/ingest.hpp"
#include "json.hpp"

using namespace crossdet::ingest;
using crossdet::ParseError;
using crossdet::geom::make_box;
namespace metrics = crossdet::metrics;

namespace
{

// Calibration of KITTI training frame 000000.
constexpr std::string_view kKittiCalib =
  "P0: 7.215377e+02 0.000000e+00 6.095593e+02 0.000000e+00 0.000000e+00 7.215377e+02 "
  "1.728540e+02 0.000000e+00 0.000000e+00 0.000000e+00 1.000000e+00 0.000000e+00\n"
  "R0_rect: 9.999239e-01 9.837760e-03 -7.445048e-03 -9.869795e-03 9.999421e-01 "
  "-4.278459e-03 7.402527e-03 4.351614e-03 9.999631e-01\n"
  "Tr_velo_to_cam: 7.533745e-03 -9.999714e-01 -6.166020e-04 -4.069766e-03 1.480249e-02 "
  "7.280733e-04 -9.998902e-01 -7.631618e-02 9.998621e-01 7.523790e-03 1.480755e-02 "
  "-2.717806e-01\n"
  "Tr_imu_to_velo: 9.999976e-01 7.553071e-04 -2.035826e-03 -8.086759e-01 -7.854027e-04 "
  "9.998898e-01 -1.482298e-02 3.195559e-01 2.024406e-03 1.482454e-02 9.998881e-01 "
  "-7.997231e-01\n";

constexpr std::string_view kAxisSwapCalib =
  "R0_rect: 1 0 0 0 1 0 0 0 1\n"
  "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n";

std::size_t parse_error_location(std::string_view text)
{
  try {
    parse_canonical(text);
  } catch (const ParseError & e) {
    return e.location();
  }
  return 0;
}

}  // namespace

TEST(Canonical, ScoreRoutesToPrediction)
{
  const auto gt = parse_canonical("000001 Car 10 2 0.8 4.2 1.8 1.5 0.3\n");
  EXPECT_FALSE(gt.scored);
  const auto frames = to_gt_frames(gt);
  ASSERT_EQ(frames.at("000001").size(), 1U);
  EXPECT_EQ(frames.at("000001")[0].class_label, "Car");
  EXPECT_DOUBLE_EQ(frames.at("000001")[0].box.length, 4.2);

  const auto pred = parse_canonical("000001 Car 10 2 0.8 4.2 1.8 1.5 0.3 0.87\n");
  EXPECT_TRUE(pred.scored);
  EXPECT_DOUBLE_EQ(to_pred_frames(pred).at("000001")[0].score, 0.87);
  EXPECT_THROW(to_gt_frames(pred), crossdet::InputError);
  EXPECT_THROW(to_pred_frames(gt), crossdet::InputError);
}

TEST(Canonical, SkipsCommentsAndBlankLinesAndGroupsFrames)
{
  const auto file = parse_canonical(
    "# frame class cx cy cz l w h yaw\n\n"
    "a Car 1 2 0.8 4 1.8 1.5 0\n"
    "b Pedestrian 3 4 0.9 0.6 0.6 1.8 0\r\n"
    "a Car -5 2 0.8 4 1.8 1.5 3.1\n");
  const auto frames = to_gt_frames(file);
  EXPECT_EQ(frames.size(), 2U);
  EXPECT_EQ(frames.at("a").size(), 2U);
  EXPECT_EQ(frames.at("b")[0].class_label, "Pedestrian");
}

TEST(Canonical, ErrorsCarryLineNumbers)
{
  const std::string good = "f Car 1 2 0.8 4 1.8 1.5 0 0.5\n";
  std::string text;
  for (int i = 0; i < 6; ++i) {
    text += good;
  }
  EXPECT_EQ(parse_error_location(text + "f Car 1 2 0.8 4 1.8 1.5\n"), 7U);
  EXPECT_EQ(parse_error_location(text + "f Car 1 2 0.8 four 1.8 1.5 0 0.5\n"), 7U);
  EXPECT_EQ(parse_error_location(text + "f Car 1 2 0.8 4 0 1.5 0 0.5\n"), 7U);
  EXPECT_EQ(parse_error_location(text + "f Car 1 2 nan 4 1 1.5 0 0.5\n"), 7U);
  EXPECT_EQ(parse_error_location(text + "f Car 1 2 0.8 4 1 1.5 0 inf\n"), 7U);
  EXPECT_EQ(parse_error_location(text + "f Car 1 2 0.8 4 1 1.5 0\n"), 7U);  // mixed
  EXPECT_EQ(parse_error_location("f Car 1 2 3 4 5 6 7 8 9 10\n"), 1U);

  try {
    parse_canonical(text + "f Car 1 2 0.8 4 1.8 1.5\n");
    FAIL();
  } catch (const ParseError & e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(Canonical, WriteParseRoundTrip)
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pos(-80.0, 80.0);
  std::uniform_real_distribution<double> dim(0.1, 12.0);
  std::uniform_real_distribution<double> yaw(-3.14, 3.14);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  metrics::PredFrames frames;
  for (int i = 0; i < 1000; ++i) {
    frames["frame_" + std::to_string(i % 37)].push_back(
      {make_box(pos(rng), pos(rng), pos(rng) / 10.0, dim(rng), dim(rng), dim(rng), yaw(rng)),
        i % 3 == 0 ? "Cyclist" : "Car", score(rng)});
  }
  std::ostringstream out;
  write_canonical(out, frames);
  const auto back = to_pred_frames(parse_canonical(out.str()));
  ASSERT_EQ(back.size(), frames.size());
  for (const auto & [id, objs] : frames) {
    const auto & other = back.at(id);
    ASSERT_EQ(other.size(), objs.size());
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const auto & a = objs[i].box;
      const auto & b = other[i].box;
      EXPECT_EQ(objs[i].class_label, other[i].class_label);
      for (auto [x, y] : {std::pair{a.cx, b.cx}, {a.cy, b.cy}, {a.cz, b.cz},
          {a.length, b.length}, {a.width, b.width}, {a.height, b.height}, {a.yaw, b.yaw},
          {objs[i].score, other[i].score}})
      {
        ASSERT_NEAR(x, y, 1e-9);
      }
    }
  }
}

TEST(KittiCalib, ParsesRealCalibration)
{
  const KittiCalib calib = parse_kitti_calib(kKittiCalib);
  EXPECT_DOUBLE_EQ(calib.rect[0], 9.999239e-01);
  EXPECT_DOUBLE_EQ(calib.velo_to_cam[11], -2.717806e-01);
}

TEST(KittiCalib, RejectsBadInput)
{
  EXPECT_THROW(parse_kitti_calib("R0_rect: 1 0 0 0 1 0 0 0 1\n"), ParseError);
  EXPECT_THROW(parse_kitti_calib("Tr_velo_to_cam: 1 0 0\n"), ParseError);
  EXPECT_THROW(
    parse_kitti_calib("Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 x\n"), ParseError);
  // Scaled rotation is not orthonormal.
  EXPECT_THROW(
    parse_kitti_calib("Tr_velo_to_cam: 0 -1.01 0 0 0 0 -1 0 1 0 0 0\n"), ParseError);
  EXPECT_THROW(
    parse_kitti_calib(
      "R0_rect: 1 0.1 0 0 1 0 0 0 1\nTr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n"),
    ParseError);
}

TEST(KittiLabel, BottomCentreIsRaisedByHalfHeight)
{
  const KittiCalib calib = parse_kitti_calib(kAxisSwapCalib);
  const auto labels = parse_kitti_label(
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.50 1.60 3.90 1.00 1.70 10.00 0.00\n",
    calib, "000042");
  ASSERT_EQ(labels.records.size(), 1U);
  const auto & r = labels.records[0];
  EXPECT_EQ(r.frame_id, "000042");
  EXPECT_EQ(r.class_label, "Car");
  EXPECT_FALSE(r.score.has_value());
  // Camera (x right, y down, z forward) -> LiDAR (x forward, y left, z up).
  EXPECT_NEAR(r.box.cx, 10.0, 1e-12);
  EXPECT_NEAR(r.box.cy, -1.0, 1e-12);
  EXPECT_NEAR(r.box.cz, -1.7 + 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(r.box.length, 3.9);
  EXPECT_DOUBLE_EQ(r.box.width, 1.6);
  EXPECT_DOUBLE_EQ(r.box.height, 1.5);
  // ry = 0 faces camera +x, which is LiDAR -y.
  EXPECT_NEAR(r.box.yaw, -std::numbers::pi / 2.0, 1e-12);
}

TEST(KittiLabel, DetectionColumnAndDontCare)
{
  const KittiCalib calib = parse_kitti_calib(kKittiCalib);
  const auto labels = parse_kitti_label(
    "Car -1 -1 -10 100 100 200 200 1.5 1.6 3.9 2.0 1.6 20.0 0.4 0.93\n"
    "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10 0.1\n"
    "Van -1 -1 -10 100 100 200 200 2.1 1.9 5.0 -4.0 1.7 30.0 -1.0 0.5\n",
    calib, "7");
  ASSERT_EQ(labels.records.size(), 2U);
  EXPECT_EQ(labels.dropped, 1U);
  EXPECT_DOUBLE_EQ(*labels.records[0].score, 0.93);
  EXPECT_EQ(labels.records[1].class_label, "Van");
  for (const auto & r : labels.records) {
    EXPECT_NO_THROW(crossdet::geom::validate(r.box));
  }
}

TEST(KittiLabel, RejectsMalformedRows)
{
  const KittiCalib calib = parse_kitti_calib(kKittiCalib);
  EXPECT_THROW(parse_kitti_label("Car 0 0 0 1 2 3 4 1.5 1.6 3.9 1 2 3\n", calib, "f"),
    ParseError);
  EXPECT_THROW(
    parse_kitti_label("Car 0 0 0 1 2 3 4 1.5 1.6 abc 1 2 3 0\n", calib, "f"), ParseError);
  EXPECT_THROW(
    parse_kitti_label("Car 0 0 0 1 2 3 4 1.5 0 3.9 1 2 3 0\n", calib, "f"), ParseError);
  try {
    parse_kitti_label(
      "Car 0 0 0 1 2 3 4 1.5 1.6 3.9 1 2 3 0\nCar 0 0 0 1 2 3 4 1.5 1.6 3.9 1 2 3\n", calib,
      "f");
    FAIL();
  } catch (const ParseError & e) {
    EXPECT_EQ(e.location(), 2U);
  }
}

TEST(KittiLabel, CameraRoundTripReproducesCentre)
{
  const KittiCalib calib = parse_kitti_calib(kKittiCalib);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-70.0, 70.0);
  std::uniform_real_distribution<double> dim(1.0, 5.0);
  std::uniform_real_distribution<double> yaw(-3.1, 3.1);
  for (int i = 0; i < 1000; ++i) {
    const auto box = make_box(pos(rng), pos(rng), pos(rng) / 30.0, dim(rng), dim(rng), dim(rng),
        yaw(rng));
    const auto back = kitti_camera_to_canonical(canonical_to_kitti_camera(box, calib), calib);
    ASSERT_NEAR(back.cx, box.cx, 1e-9);
    ASSERT_NEAR(back.cy, box.cy, 1e-9);
    ASSERT_NEAR(back.cz, box.cz, 1e-9);
    ASSERT_DOUBLE_EQ(back.length, box.length);
  }

  // With an exact axis permutation the heading survives too.
  const KittiCalib swap = parse_kitti_calib(kAxisSwapCalib);
  for (int i = 0; i < 200; ++i) {
    const auto box = make_box(pos(rng), pos(rng), 0.5, 4, 2, 1.5, yaw(rng));
    const auto back = kitti_camera_to_canonical(canonical_to_kitti_camera(box, swap), swap);
    ASSERT_NEAR(std::remainder(back.yaw - box.yaw, 2.0 * std::numbers::pi), 0.0, 1e-12);
  }
}

TEST(PointCloud, SizesAndErrors)
{
  EXPECT_TRUE(read_pointcloud({}).empty());

  PointCloud two{{1.0F, 2.0F, 3.0F, 0.5F}, {-4.0F, 5.5F, -0.25F, 0.0F}};
  const auto blob = write_pointcloud(two);
  ASSERT_EQ(blob.size(), 32U);
  EXPECT_EQ(read_pointcloud(blob), two);
  // Little-endian float32: 1.0f is 00 00 80 3F.
  EXPECT_EQ(std::to_integer<int>(blob[2]), 0x80);
  EXPECT_EQ(std::to_integer<int>(blob[3]), 0x3F);

  auto truncated = blob;
  truncated.pop_back();
  try {
    read_pointcloud(truncated);
    FAIL();
  } catch (const ParseError & e) {
    EXPECT_EQ(e.location(), 16U);
  }

  PointCloud bad = two;
  bad.push_back({std::numeric_limits<float>::quiet_NaN(), 0.0F, 0.0F, 0.0F});
  try {
    read_pointcloud(write_pointcloud(bad));
    FAIL();
  } catch (const ParseError & e) {
    EXPECT_EQ(e.location(), 32U);
    EXPECT_NE(std::string(e.what()).find("point 2"), std::string::npos);
  }
}

TEST(PointCloud, RoundTripIsExact)
{
  std::mt19937 rng(99);
  std::uniform_real_distribution<float> v(-100.0F, 100.0F);
  PointCloud cloud(10000);
  for (auto & p : cloud) {
    p = {v(rng), v(rng), v(rng), v(rng) / 100.0F};
  }
  EXPECT_EQ(read_pointcloud(write_pointcloud(cloud)), cloud);
}

namespace
{

metrics::ApReport report_from(const metrics::GtFrames & g, const metrics::PredFrames & p)
{
  return metrics::evaluate(g, p, metrics::EvalConfig{});
}

metrics::GtFrames two_cars()
{
  return {{"a", {{make_box(10, 0, 0.75, 4, 1.8, 1.5, 0), "Car"},
    {make_box(50, 0, 0.75, 4, 1.8, 1.5, 0), "Car"}}}};
}

}  // namespace

TEST(Report, TableShowsOneDecimalAndDash)
{
  const auto gts = two_cars();
  metrics::PredFrames perfect{{"a", {}}};
  for (const auto & g : gts.at("a")) {
    perfect["a"].push_back({g.box, "Car", 0.9});
  }
  const std::string table = write_report(report_from(gts, perfect), ReportFormat::kTable);
  EXPECT_NE(table.find("easy"), std::string::npos);
  std::size_t count = 0;
  for (auto pos = table.find("100.0"); pos != std::string::npos;
    pos = table.find("100.0", pos + 1))
  {
    ++count;
  }
  EXPECT_EQ(count, 21U);

  // Only a far car: easy has nothing to recall.
  metrics::GtFrames far{{"a", {{make_box(50, 0, 0.75, 4, 1.8, 1.5, 0), "Car"}}}};
  const auto r = report_from(far, {});
  const std::string t2 = write_report(r, ReportFormat::kTable);
  EXPECT_NE(t2.find("—"), std::string::npos);
  EXPECT_NE(t2.find("0.0"), std::string::npos);
  EXPECT_NE(write_report(r, ReportFormat::kCsv).find("3d,easy,—,0,0"), std::string::npos);
}

TEST(Report, CsvParsesBackExactly)
{
  metrics::GtFrames gts = two_cars();
  metrics::PredFrames preds{{"a", {
    {make_box(10.3, 0.1, 0.75, 4.1, 1.9, 1.5, 0.05), "Car", 0.8},
    {make_box(50, 0, 0.75, 4, 1.8, 1.5, 0), "Car", 0.95},
    {make_box(30, 5, 0.75, 4, 1.8, 1.5, 0), "Car", 0.99}}}};
  const auto report = report_from(gts, preds);
  const std::string csv = write_report(report, ReportFormat::kCsv);
  EXPECT_TRUE(csv.starts_with("metric,difficulty,ap,gt_count,prediction_count\n"));
  const auto rows = parse_report_csv(csv);
  ASSERT_EQ(rows.size(), 21U);
  for (const auto & row : rows) {
    const auto & cell = report.at(row.metric, row.difficulty);
    EXPECT_EQ(row.ap, cell.ap);
    EXPECT_EQ(row.gt_count, cell.gt_count);
    EXPECT_EQ(row.prediction_count, cell.prediction_count);
  }
  EXPECT_THROW(parse_report_csv("metric,ap\n"), ParseError);
  EXPECT_THROW(parse_report_csv(
      "metric,difficulty,ap,gt_count,prediction_count\nfoo,easy,1,1,1\n"), ParseError);
}

TEST(Report, StructuredCarriesCurves)
{
  const auto gts = two_cars();
  metrics::PredFrames preds{{"a", {{gts.at("a")[0].box, "Car", 0.7}}}};
  metrics::GtFrames with_far = gts;
  const auto doc = nlohmann::json::parse(
    write_report(report_from(with_far, preds), ReportFormat::kStructured));
  EXPECT_EQ(doc["recall_points"], 40);
  ASSERT_EQ(doc["cells"].size(), 21U);
  const auto & first = doc["cells"][0];
  EXPECT_EQ(first["metric"], "3d");
  EXPECT_EQ(first["difficulty"], "easy");
  EXPECT_DOUBLE_EQ(first["ap"].get<double>(), 100.0);
  ASSERT_EQ(first["curve"].size(), 1U);
  EXPECT_DOUBLE_EQ(first["curve"][0]["score"].get<double>(), 0.7);

  metrics::GtFrames far{{"a", {{make_box(50, 0, 0.75, 4, 1.8, 1.5, 0), "Car"}}}};
  const auto doc2 = nlohmann::json::parse(
    write_report(report_from(far, {}), ReportFormat::kStructured));
  EXPECT_TRUE(doc2["cells"][0]["ap"].is_null());
}
