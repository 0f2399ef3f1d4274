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


#ifndef CROSSDET__METRICS_HPP_
#define CROSSDET__METRICS_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossdet/geom.hpp"

namespace crossdet::metrics
{

struct GroundTruthObject
{
  geom::Box3D box;
  std::string class_label;
};

struct Prediction
{
  geom::Box3D box;
  std::string class_label;
  double score{0.0};
};

/// Frames keyed by frame id. The ordered map fixes iteration order, which
/// the evaluator relies on for reproducible tie-breaking.
using GtFrames = std::map<std::string, std::vector<GroundTruthObject>>;
using PredFrames = std::map<std::string, std::vector<Prediction>>;

enum class MetricKind { k3d, kBev, kSide, kFront, kLength, kWidth, kHeight };
enum class Difficulty { kEasy, kModerate, kHard };

inline constexpr std::array<MetricKind, 7> kAllMetrics{
  MetricKind::k3d, MetricKind::kBev, MetricKind::kSide, MetricKind::kFront,
  MetricKind::kLength, MetricKind::kWidth, MetricKind::kHeight};
inline constexpr std::array<Difficulty, 3> kAllDifficulties{
  Difficulty::kEasy, Difficulty::kModerate, Difficulty::kHard};

std::string_view to_string(MetricKind kind);
std::string_view to_string(Difficulty difficulty);
std::optional<MetricKind> metric_from_string(std::string_view name);
std::optional<Difficulty> difficulty_from_string(std::string_view name);

/// True for the single-dimension metrics, which use `dim_iou_threshold`.
bool is_dimension_metric(MetricKind kind);

struct EvalConfig
{
  double box_iou_threshold{0.7};
  double dim_iou_threshold{0.85};
  /// Maximum horizontal sensor distance of each difficulty bucket.
  std::array<double, 3> difficulty_depths{30.0, 70.0, 70.0};
  int recall_points{40};
  std::string target_class{"Car"};
  std::vector<MetricKind> metrics{kAllMetrics.begin(), kAllMetrics.end()};

  double threshold_for(MetricKind kind) const;
};

/// Throws InputError when thresholds or recall_points are out of range.
void validate(const EvalConfig & cfg);

/// Horizontal distance of the box centre from the sensor origin.
double depth_of(const geom::Box3D & box);

/// Buckets are cumulative: an object inside the easy radius also belongs to
/// moderate and hard when their radii are at least as large.
std::vector<Difficulty> assign_difficulty(const GroundTruthObject & gt, const EvalConfig & cfg);
bool in_bucket(const GroundTruthObject & gt, Difficulty difficulty, const EvalConfig & cfg);

/// IoU of `pred` against `gt` under the given metric. The dimension metrics
/// score 0 unless the two BEV footprints overlap.
double metric_iou(MetricKind kind, const geom::Box3D & gt, const geom::Box3D & pred);

enum class Verdict { kTruePositive, kFalsePositive, kIgnored };

struct ScoredVerdict
{
  double score{0.0};
  Verdict verdict{Verdict::kIgnored};
};

struct FrameMatch
{
  std::vector<Verdict> prediction_verdicts;  // parallel to the input predictions
  std::vector<bool> gt_matched;              // parallel to the input ground truth
  std::size_t gt_in_bucket{0};
};

/// Greedy score-ordered matching within one frame. Each prediction of the
/// target class takes the unmatched in-bucket ground truth with the highest
/// IoU at or above threshold. Failing that, a match against out-of-bucket
/// ground truth marks the prediction ignored; otherwise it is a false
/// positive. Predictions of other classes are ignored.
FrameMatch match_frame(
  const std::vector<Prediction> & preds, const std::vector<GroundTruthObject> & gts,
  MetricKind kind, Difficulty difficulty, const EvalConfig & cfg);

/// Same matching with a precomputed IoU matrix, iou[p][g].
FrameMatch match_frame(
  const std::vector<Prediction> & preds, const std::vector<GroundTruthObject> & gts,
  const std::vector<std::vector<double>> & iou, double threshold, Difficulty difficulty,
  const EvalConfig & cfg);

struct PrPoint
{
  double score_cutoff{0.0};
  double precision{0.0};
  double recall{0.0};
};

struct PrCurve
{
  std::vector<PrPoint> points;  // in order of decreasing cutoff
  std::size_t gt_count{0};

  /// AP is undefined when there is nothing to recall.
  bool defined() const {return gt_count > 0;}
};

PrCurve pr_curve(std::vector<ScoredVerdict> verdicts, std::size_t gt_count);

/// Interpolated AP in percent at `recall_points` levels (40: 1/40 .. 1; 11:
/// 0, 0.1 .. 1). Returns nullopt for an undefined curve.
std::optional<double> average_precision(const PrCurve & curve, int recall_points);

struct ApCell
{
  std::optional<double> ap;
  PrCurve curve;
  std::size_t gt_count{0};
  std::size_t prediction_count{0};  // true plus false positives
};

struct ApReport
{
  std::map<MetricKind, std::array<ApCell, 3>> cells;
  int recall_points{40};

  const ApCell & at(MetricKind kind, Difficulty difficulty) const;
  bool has(MetricKind kind) const {return cells.count(kind) != 0;}
};

/// Computes AP for every configured metric in every difficulty bucket. Throws InputError when a prediction frame id is missing from
/// the ground truth.
ApReport evaluate(const GtFrames & gt_frames, const PredFrames & pred_frames, const EvalConfig & cfg);

}  // namespace crossdet::metrics

#endif  // CROSSDET__METRICS_HPP_
