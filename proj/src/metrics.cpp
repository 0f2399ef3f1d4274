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


#include "crossdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "crossdet/errors.hpp"

namespace crossdet::metrics
{

namespace
{

constexpr std::array<std::string_view, 7> kMetricNames{
  "3d", "bev", "side", "front", "length", "width", "height"};
constexpr std::array<std::string_view, 3> kDifficultyNames{"easy", "moderate", "hard"};

std::size_t index_of(Difficulty d) {return static_cast<std::size_t>(d);}

/// Prediction indices by descending score, ties kept in input order.
std::vector<std::size_t> score_order(const std::vector<Prediction> & preds)
{
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(
    order.begin(), order.end(),
    [&](std::size_t a, std::size_t b) {return preds[a].score > preds[b].score;});
  return order;
}

}  // namespace

std::string_view to_string(MetricKind kind)
{
  return kMetricNames[static_cast<std::size_t>(kind)];
}

std::string_view to_string(Difficulty difficulty)
{
  return kDifficultyNames[index_of(difficulty)];
}

std::optional<MetricKind> metric_from_string(std::string_view name)
{
  for (MetricKind kind : kAllMetrics) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  return std::nullopt;
}

std::optional<Difficulty> difficulty_from_string(std::string_view name)
{
  for (Difficulty d : kAllDifficulties) {
    if (to_string(d) == name) {
      return d;
    }
  }
  return std::nullopt;
}

bool is_dimension_metric(MetricKind kind)
{
  return kind == MetricKind::kLength || kind == MetricKind::kWidth ||
         kind == MetricKind::kHeight;
}

double EvalConfig::threshold_for(MetricKind kind) const
{
  return is_dimension_metric(kind) ? dim_iou_threshold : box_iou_threshold;
}

void validate(const EvalConfig & cfg)
{
  auto in_unit = [](double t) {return t > 0.0 && t <= 1.0;};
  if (!in_unit(cfg.box_iou_threshold) || !in_unit(cfg.dim_iou_threshold)) {
    throw InputError("IoU thresholds must lie in (0, 1]");
  }
  if (cfg.recall_points != 11 && cfg.recall_points != 40) {
    throw InputError("recall points must be 11 or 40");
  }
  for (double d : cfg.difficulty_depths) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw InputError("difficulty depths must be positive");
    }
  }
  if (cfg.target_class.empty()) {
    throw InputError("target class must not be empty");
  }
}

double depth_of(const geom::Box3D & box)
{
  return std::hypot(box.cx, box.cy);
}

bool in_bucket(const GroundTruthObject & gt, Difficulty difficulty, const EvalConfig & cfg)
{
  return depth_of(gt.box) <= cfg.difficulty_depths[index_of(difficulty)];
}

std::vector<Difficulty> assign_difficulty(const GroundTruthObject & gt, const EvalConfig & cfg)
{
  std::vector<Difficulty> out;
  for (Difficulty d : kAllDifficulties) {
    if (in_bucket(gt, d, cfg)) {
      out.push_back(d);
    }
  }
  return out;
}

double metric_iou(MetricKind kind, const geom::Box3D & gt, const geom::Box3D & pred)
{
  // A single dimension says nothing about where the boxes are; only pairs
  // whose footprints overlap may be compared.
  if (is_dimension_metric(kind) && geom::iou_bev(gt, pred) <= 0.0) {
    return 0.0;
  }
  switch (kind) {
    case MetricKind::k3d:
      return geom::iou_3d(gt, pred);
    case MetricKind::kBev:
      return geom::iou_bev(gt, pred);
    case MetricKind::kSide:
      return geom::iou_aligned(geom::side_view_rect(gt), geom::side_view_rect(pred));
    case MetricKind::kFront:
      return geom::iou_aligned(geom::front_view_rect(gt), geom::front_view_rect(pred));
    case MetricKind::kLength:
      return geom::iou_1d_dimension(gt, pred, geom::DimensionAxis::kLength);
    case MetricKind::kWidth:
      return geom::iou_1d_dimension(gt, pred, geom::DimensionAxis::kWidth);
    case MetricKind::kHeight:
      return geom::iou_1d_dimension(gt, pred, geom::DimensionAxis::kHeight);
  }
  return 0.0;
}

FrameMatch match_frame(
  const std::vector<Prediction> & preds, const std::vector<GroundTruthObject> & gts,
  const std::vector<std::vector<double>> & iou, double threshold, Difficulty difficulty,
  const EvalConfig & cfg)
{
  FrameMatch result;
  result.prediction_verdicts.assign(preds.size(), Verdict::kIgnored);
  result.gt_matched.assign(gts.size(), false);

  std::vector<bool> target(gts.size(), false);
  std::vector<bool> inside(gts.size(), false);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    target[g] = gts[g].class_label == cfg.target_class;
    inside[g] = target[g] && in_bucket(gts[g], difficulty, cfg);
    if (inside[g]) {
      ++result.gt_in_bucket;
    }
  }

  for (std::size_t p : score_order(preds)) {
    if (preds[p].class_label != cfg.target_class) {
      continue;
    }
    // Best candidate among in-bucket GT first, then among ignorable GT.
    std::optional<std::size_t> best_in;
    std::optional<std::size_t> best_out;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!target[g] || result.gt_matched[g] || iou[p][g] < threshold) {
        continue;
      }
      auto & best = inside[g] ? best_in : best_out;
      if (!best || iou[p][g] > iou[p][*best]) {
        best = g;
      }
    }
    if (best_in) {
      result.gt_matched[*best_in] = true;
      result.prediction_verdicts[p] = Verdict::kTruePositive;
    } else if (best_out) {
      result.gt_matched[*best_out] = true;
      result.prediction_verdicts[p] = Verdict::kIgnored;
    } else {
      result.prediction_verdicts[p] = Verdict::kFalsePositive;
    }
  }
  return result;
}

namespace
{

std::vector<std::vector<double>> iou_matrix(
  const std::vector<Prediction> & preds, const std::vector<GroundTruthObject> & gts,
  MetricKind kind, const std::string & target_class)
{
  std::vector<std::vector<double>> iou(preds.size(), std::vector<double>(gts.size(), 0.0));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (preds[p].class_label != target_class) {
      continue;
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].class_label == target_class) {
        iou[p][g] = metric_iou(kind, gts[g].box, preds[p].box);
      }
    }
  }
  return iou;
}

}  // namespace

FrameMatch match_frame(
  const std::vector<Prediction> & preds, const std::vector<GroundTruthObject> & gts,
  MetricKind kind, Difficulty difficulty, const EvalConfig & cfg)
{
  return match_frame(
    preds, gts, iou_matrix(preds, gts, kind, cfg.target_class), cfg.threshold_for(kind),
    difficulty, cfg);
}

PrCurve pr_curve(std::vector<ScoredVerdict> verdicts, std::size_t gt_count)
{
  PrCurve curve;
  curve.gt_count = gt_count;
  if (gt_count == 0) {
    return curve;
  }
  std::erase_if(verdicts, [](const ScoredVerdict & v) {return v.verdict == Verdict::kIgnored;});
  std::stable_sort(
    verdicts.begin(), verdicts.end(),
    [](const ScoredVerdict & a, const ScoredVerdict & b) {return a.score > b.score;});

  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < verdicts.size(); ) {
    // Consume every verdict sharing this score: a cutoff admits all of them.
    const double cutoff = verdicts[i].score;
    bool has_tp = false;
    for (; i < verdicts.size() && verdicts[i].score == cutoff; ++i) {
      if (verdicts[i].verdict == Verdict::kTruePositive) {
        ++tp;
        has_tp = true;
      } else {
        ++fp;
      }
    }
    if (has_tp) {
      curve.points.push_back(
        {cutoff, static_cast<double>(tp) / static_cast<double>(tp + fp),
          static_cast<double>(tp) / static_cast<double>(gt_count)});
    }
  }
  return curve;
}

std::optional<double> average_precision(const PrCurve & curve, int recall_points)
{
  if (recall_points != 11 && recall_points != 40) {
    throw InputError("recall points must be 11 or 40");
  }
  if (!curve.defined()) {
    return std::nullopt;
  }
  // Suffix maximum of precision: max precision over points with recall >= r.
  std::vector<double> best(curve.points.size() + 1, 0.0);
  for (std::size_t i = curve.points.size(); i-- > 0; ) {
    best[i] = std::max(best[i + 1], curve.points[i].precision);
  }
  auto max_precision_at = [&](double level) {
      auto it = std::lower_bound(
        curve.points.begin(), curve.points.end(), level,
        [](const PrPoint & p, double r) {return p.recall < r;});
      return best[static_cast<std::size_t>(it - curve.points.begin())];
    };

  double sum = 0.0;
  if (recall_points == 40) {
    for (int i = 1; i <= 40; ++i) {
      sum += max_precision_at(static_cast<double>(i) / 40.0);
    }
  } else {
    for (int i = 0; i <= 10; ++i) {
      sum += max_precision_at(static_cast<double>(i) / 10.0);
    }
  }
  return 100.0 * sum / static_cast<double>(recall_points);
}

const ApCell & ApReport::at(MetricKind kind, Difficulty difficulty) const
{
  auto it = cells.find(kind);
  if (it == cells.end()) {
    throw InputError("report has no rows for metric " + std::string(to_string(kind)));
  }
  return it->second[index_of(difficulty)];
}

ApReport evaluate(const GtFrames & gt_frames, const PredFrames & pred_frames, const EvalConfig & cfg)
{
  validate(cfg);

  std::vector<std::string> orphans;
  for (const auto & [id, preds] : pred_frames) {
    if (gt_frames.count(id) == 0) {
      orphans.push_back(id);
    }
  }
  if (!orphans.empty()) {
    std::string ids;
    for (const auto & id : orphans) {
      ids += (ids.empty() ? "" : ", ") + id;
    }
    throw InputError("prediction frames without ground truth: " + ids);
  }

  const std::vector<Prediction> no_preds;
  ApReport report;
  report.recall_points = cfg.recall_points;

  for (MetricKind kind : cfg.metrics) {
    if (report.has(kind)) {
      continue;
    }
    std::array<std::vector<ScoredVerdict>, 3> verdicts;
    std::array<std::size_t, 3> gt_counts{};
    for (const auto & [id, gts] : gt_frames) {
      auto it = pred_frames.find(id);
      const auto & preds = it == pred_frames.end() ? no_preds : it->second;
      const auto iou = iou_matrix(preds, gts, kind, cfg.target_class);
      for (Difficulty d : kAllDifficulties) {
        const FrameMatch m = match_frame(preds, gts, iou, cfg.threshold_for(kind), d, cfg);
        gt_counts[index_of(d)] += m.gt_in_bucket;
        for (std::size_t p = 0; p < preds.size(); ++p) {
          verdicts[index_of(d)].push_back({preds[p].score, m.prediction_verdicts[p]});
        }
      }
    }
    auto & row = report.cells[kind];
    for (Difficulty d : kAllDifficulties) {
      ApCell & cell = row[index_of(d)];
      const auto & v = verdicts[index_of(d)];
      cell.gt_count = gt_counts[index_of(d)];
      cell.prediction_count = static_cast<std::size_t>(
        std::count_if(
          v.begin(), v.end(),
          [](const ScoredVerdict & s) {return s.verdict != Verdict::kIgnored;}));
      cell.curve = pr_curve(v, cell.gt_count);
      cell.ap = average_precision(cell.curve, cfg.recall_points);
    }
  }
  return report;
}

}  // namespace crossdet::metrics
