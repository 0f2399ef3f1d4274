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


#ifndef CROSSDET__SIMULATE_HPP_
#define CROSSDET__SIMULATE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crossdet/harmonize.hpp"
#include "crossdet/metrics.hpp"

namespace crossdet::simulate
{

enum class YawModel
{
  kRoadAligned,  ///< heading 0 or pi plus Gaussian jitter
  kUniform,      ///< uniform in (-pi, pi]
};

/// Synthetic cross-domain experiment. Ground truth is drawn from
/// `target_profile`; a detector trained on `source_profile` predicts
///   size = alpha * source_mean + (1 - alpha) * gt_size
/// with Gaussian centre and yaw jitter.
struct SimConfig
{
  harmonize::DatasetProfile source_profile{harmonize::builtin_profile("waymo")};
  harmonize::DatasetProfile target_profile{harmonize::builtin_profile("kitti")};
  int frames{500};
  int cars_min{4};
  int cars_max{12};
  /// x_min, y_min, x_max, y_max of car centres. Most cars sit inside the
  /// nearest difficulty cutoff, as in camera-annotated driving data.
  std::array<double, 4> placement_range{-30.0, -30.0, 30.0, 30.0};
  double overfit_alpha{1.0};
  double center_noise{0.1};   // metres, per horizontal axis
  double yaw_noise{0.02};     // radians
  YawModel yaw_model{YawModel::kRoadAligned};
  double heading_jitter{0.05};  // radians, road-aligned model only
  /// Probability that a car gets no prediction.
  double drop_rate{0.0};
  /// Expected spurious predictions per ground-truth car.
  double spawn_rate{0.0};
  std::uint64_t seed{42};
  std::string class_label{"Car"};
};

/// Throws InputError on out-of-range fields.
void validate(const SimConfig & cfg);

std::string frame_id(int frame_index);

/// Ground truth for one frame; a pure function of (cfg.seed, frame_index).
std::vector<metrics::GroundTruthObject> sample_scene(const SimConfig & cfg, int frame_index);

/// Score given to a prediction of `gt`:
///   max(0, 1 - (mean relative size error + centre offset / gt length
///               + |yaw error| / pi))
double detection_score(const geom::Box3D & gt, const geom::Box3D & pred);

/// One prediction per car (minus drops, plus spawns), a pure function of
/// (cfg.seed, frame_index, object index).
std::vector<metrics::Prediction> biased_detector(
  const std::vector<metrics::GroundTruthObject> & gt_frame, const SimConfig & cfg,
  int frame_index);

struct SimResult
{
  metrics::ApReport report;
  metrics::GtFrames gt_frames;
  metrics::PredFrames pred_frames;
  /// Gap of the source profile against the generated ground truth.
  harmonize::SizeGap realized_gap;
};

SimResult run_experiment(
  const SimConfig & cfg, const metrics::EvalConfig & eval_cfg = metrics::EvalConfig{});

harmonize::KeyValues to_key_values(const SimConfig & cfg);
SimConfig sim_config_from(const harmonize::KeyValues & kv);

}  // namespace crossdet::simulate

#endif  // CROSSDET__SIMULATE_HPP_
