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


#include "crossdet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "crossdet/errors.hpp"
#include "crossdet/text.hpp"

namespace crossdet::simulate
{

namespace
{

constexpr double kMinSize = 0.5;
constexpr int kPlacementTries = 50;

enum class Stream : std::uint64_t { kScene = 1, kDetector = 2, kSpawn = 3 };

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the state depends only on the master seed and the
/// (stream, frame, object) coordinates, never on generation order.
class Rng
{
public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t frame, std::uint64_t object = 0)
  : engine_(splitmix64(
        splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(stream)) + frame) + object)) {}

  /// Uniform in [0, 1).
  double uniform() {return static_cast<double>(engine_() >> 11) * 0x1.0p-53;}

  double uniform(double lo, double hi) {return lo + (hi - lo) * uniform();}

  /// Box-Muller; the standard library's distributions are not specified
  /// bit-for-bit, this is.
  double normal()
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard normal restricted to [-3, 3].
  double truncated_normal()
  {
    while (true) {
      const double z = normal();
      if (std::abs(z) <= 3.0) {
        return z;
      }
    }
  }

private:
  std::mt19937_64 engine_;
};

double draw_size(Rng & rng, double mean, double spread)
{
  const double z = rng.truncated_normal();
  return std::max(kMinSize, mean + spread * z);
}

double footprint_radius(const geom::Box3D & b)
{
  return std::hypot(b.length, b.width) / 2.0;
}

bool collides(const geom::Box3D & box, const std::vector<metrics::GroundTruthObject> & placed)
{
  return std::any_of(
    placed.begin(), placed.end(), [&](const metrics::GroundTruthObject & o) {
      return std::hypot(box.cx - o.box.cx, box.cy - o.box.cy) <
      footprint_radius(box) + footprint_radius(o.box);
    });
}

}  // namespace

void validate(const SimConfig & cfg)
{
  harmonize::validate(cfg.source_profile);
  harmonize::validate(cfg.target_profile);
  if (cfg.frames < 1) {
    throw InputError("frames must be at least 1");
  }
  if (cfg.cars_min < 0 || cfg.cars_max < cfg.cars_min) {
    throw InputError("cars per frame must satisfy 0 <= min <= max");
  }
  const auto & r = cfg.placement_range;
  if (!(r[0] < r[2]) || !(r[1] < r[3])) {
    throw InputError("placement range minimum must be below maximum");
  }
  const harmonize::HarmonizeConfig defaults;
  if (r[0] < defaults.point_range[0] || r[1] < defaults.point_range[1] ||
    r[2] > defaults.point_range[3] || r[3] > defaults.point_range[4])
  {
    throw InputError("placement range must lie inside the harmonized point range");
  }
  if (!(cfg.overfit_alpha >= 0.0 && cfg.overfit_alpha <= 1.0)) {
    throw InputError("overfit alpha must lie in [0, 1]");
  }
  for (double v : {cfg.center_noise, cfg.yaw_noise, cfg.heading_jitter}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("noise levels must be non-negative");
    }
  }
  if (!(cfg.drop_rate >= 0.0 && cfg.drop_rate <= 1.0) ||
    !(cfg.spawn_rate >= 0.0 && cfg.spawn_rate <= 1.0))
  {
    throw InputError("drop and spawn rates must lie in [0, 1]");
  }
}

std::string frame_id(int frame_index)
{
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%06d", frame_index);
  return buf.data();
}

std::vector<metrics::GroundTruthObject> sample_scene(const SimConfig & cfg, int frame_index)
{
  Rng rng(cfg.seed, Stream::kScene, static_cast<std::uint64_t>(frame_index));
  const auto & p = cfg.target_profile;
  const auto & r = cfg.placement_range;
  const int span = cfg.cars_max - cfg.cars_min + 1;
  const int count = cfg.cars_min + std::min(
    span - 1, static_cast<int>(rng.uniform() * static_cast<double>(span)));

  std::vector<metrics::GroundTruthObject> cars;
  cars.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double width = draw_size(rng, p.mean_width, p.spread_width);
    const double height = draw_size(rng, p.mean_height, p.spread_height);
    const double length = draw_size(rng, p.mean_length, p.spread_length);
    double yaw = 0.0;
    if (cfg.yaw_model == YawModel::kUniform) {
      yaw = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
    } else {
      const double heading = rng.uniform() < 0.5 ? 0.0 : std::numbers::pi;
      yaw = heading + cfg.heading_jitter * rng.normal();
    }
    geom::Box3D box{};
    for (int attempt = 0; attempt < kPlacementTries; ++attempt) {
      box = geom::make_box(
        rng.uniform(r[0], r[2]), rng.uniform(r[1], r[3]), height / 2.0, length, width, height,
        yaw);
      if (!collides(box, cars)) {
        break;
      }
    }
    cars.push_back({box, cfg.class_label});
  }
  return cars;
}

double detection_score(const geom::Box3D & gt, const geom::Box3D & pred)
{
  const double size_error =
    (std::abs(pred.length - gt.length) / gt.length +
    std::abs(pred.width - gt.width) / gt.width +
    std::abs(pred.height - gt.height) / gt.height) / 3.0;
  const double center_error = std::hypot(pred.cx - gt.cx, pred.cy - gt.cy) / gt.length;
  const double yaw_error = std::abs(geom::normalize_yaw(pred.yaw - gt.yaw)) / std::numbers::pi;
  return std::max(0.0, 1.0 - (size_error + center_error + yaw_error));
}

std::vector<metrics::Prediction> biased_detector(
  const std::vector<metrics::GroundTruthObject> & gt_frame, const SimConfig & cfg,
  int frame_index)
{
  const double a = cfg.overfit_alpha;
  const auto & src = cfg.source_profile;
  const auto frame = static_cast<std::uint64_t>(frame_index);

  std::vector<metrics::Prediction> preds;
  preds.reserve(gt_frame.size());
  for (std::size_t i = 0; i < gt_frame.size(); ++i) {
    Rng rng(cfg.seed, Stream::kDetector, frame, i);
    const geom::Box3D & gt = gt_frame[i].box;
    // Draw every variate up front so the stream layout does not depend on
    // which options are active.
    const double drop_u = rng.uniform();
    const double nx = rng.normal();
    const double ny = rng.normal();
    const double nyaw = rng.normal();
    if (drop_u < cfg.drop_rate) {
      continue;
    }
    const double length = a * src.mean_length + (1.0 - a) * gt.length;
    const double width = a * src.mean_width + (1.0 - a) * gt.width;
    const double height = a * src.mean_height + (1.0 - a) * gt.height;
    const double ground = gt.cz - gt.height / 2.0;
    const geom::Box3D box = geom::make_box(
      gt.cx + cfg.center_noise * nx, gt.cy + cfg.center_noise * ny, ground + height / 2.0,
      length, width, height, gt.yaw + cfg.yaw_noise * nyaw);
    preds.push_back({box, gt_frame[i].class_label, detection_score(gt, box)});
  }

  if (cfg.spawn_rate > 0.0) {
    Rng rng(cfg.seed, Stream::kSpawn, frame);
    const auto & r = cfg.placement_range;
    for (std::size_t i = 0; i < gt_frame.size(); ++i) {
      const double u = rng.uniform();
      const double x = rng.uniform(r[0], r[2]);
      const double y = rng.uniform(r[1], r[3]);
      const double yaw = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
      const double score = 0.5 * rng.uniform();
      if (u < cfg.spawn_rate) {
        const geom::Box3D box = geom::make_box(
          x, y, src.mean_height / 2.0, src.mean_length, src.mean_width, src.mean_height, yaw);
        preds.push_back({box, cfg.class_label, score});
      }
    }
  }
  return preds;
}

SimResult run_experiment(const SimConfig & cfg, const metrics::EvalConfig & eval_cfg)
{
  validate(cfg);
  SimResult result;
  for (int f = 0; f < cfg.frames; ++f) {
    auto gt = sample_scene(cfg, f);
    auto preds = biased_detector(gt, cfg, f);
    const std::string id = frame_id(f);
    result.pred_frames.emplace(id, std::move(preds));
    result.gt_frames.emplace(id, std::move(gt));
  }
  result.report = metrics::evaluate(result.gt_frames, result.pred_frames, eval_cfg);
  try {
    result.realized_gap = harmonize::percentage_gap(
      cfg.source_profile,
      harmonize::size_statistics(result.gt_frames, cfg.class_label, "generated"));
  } catch (const EmptyInput &) {
    result.realized_gap = {};
  }
  return result;
}

namespace
{

void put_profile(
  harmonize::KeyValues & kv, const std::string & prefix, const harmonize::DatasetProfile & p)
{
  for (const auto & [k, v] : harmonize::to_key_values(p)) {
    kv[prefix + "." + k] = v;
  }
}

harmonize::DatasetProfile get_profile(
  const harmonize::KeyValues & kv, const std::string & prefix)
{
  harmonize::KeyValues sub;
  for (const auto & [k, v] : kv) {
    if (k.starts_with(prefix + ".")) {
      sub[k.substr(prefix.size() + 1)] = v;
    }
  }
  return harmonize::dataset_profile_from(sub);
}

double get_double(const harmonize::KeyValues & kv, const std::string & key)
{
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw ParseError("missing key '" + key + "'", 0);
  }
  auto v = text::parse_double(it->second);
  if (!v) {
    throw ParseError("key '" + key + "' is not a number", 0);
  }
  return *v;
}

const std::string & get_string(const harmonize::KeyValues & kv, const std::string & key)
{
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw ParseError("missing key '" + key + "'", 0);
  }
  return it->second;
}

int get_int(const harmonize::KeyValues & kv, const std::string & key)
{
  const double v = get_double(kv, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParseError("key '" + key + "' is not an integer", 0);
  }
  return static_cast<int>(v);
}

}  // namespace

harmonize::KeyValues to_key_values(const SimConfig & cfg)
{
  harmonize::KeyValues kv;
  put_profile(kv, "source", cfg.source_profile);
  put_profile(kv, "target", cfg.target_profile);
  kv["frames"] = std::to_string(cfg.frames);
  kv["cars_min"] = std::to_string(cfg.cars_min);
  kv["cars_max"] = std::to_string(cfg.cars_max);
  std::string range;
  for (double v : cfg.placement_range) {
    range += (range.empty() ? "" : ",") + text::format_double(v);
  }
  kv["placement_range"] = range;
  kv["overfit_alpha"] = text::format_double(cfg.overfit_alpha);
  kv["center_noise"] = text::format_double(cfg.center_noise);
  kv["yaw_noise"] = text::format_double(cfg.yaw_noise);
  kv["yaw_model"] = cfg.yaw_model == YawModel::kUniform ? "uniform" : "road";
  kv["heading_jitter"] = text::format_double(cfg.heading_jitter);
  kv["drop_rate"] = text::format_double(cfg.drop_rate);
  kv["spawn_rate"] = text::format_double(cfg.spawn_rate);
  kv["seed"] = std::to_string(cfg.seed);
  kv["class"] = cfg.class_label;
  return kv;
}

SimConfig sim_config_from(const harmonize::KeyValues & kv)
{
  SimConfig cfg;
  cfg.source_profile = get_profile(kv, "source");
  cfg.target_profile = get_profile(kv, "target");
  cfg.frames = get_int(kv, "frames");
  cfg.cars_min = get_int(kv, "cars_min");
  cfg.cars_max = get_int(kv, "cars_max");
  auto range = text::parse_double_list(get_string(kv, "placement_range"), 4);
  if (!range) {
    throw ParseError("placement_range needs 4 comma-separated numbers", 0);
  }
  std::copy(range->begin(), range->end(), cfg.placement_range.begin());
  cfg.overfit_alpha = get_double(kv, "overfit_alpha");
  cfg.center_noise = get_double(kv, "center_noise");
  cfg.yaw_noise = get_double(kv, "yaw_noise");
  const std::string & model = get_string(kv, "yaw_model");
  if (model == "uniform") {
    cfg.yaw_model = YawModel::kUniform;
  } else if (model == "road") {
    cfg.yaw_model = YawModel::kRoadAligned;
  } else {
    throw ParseError("yaw_model must be 'road' or 'uniform'", 0);
  }
  cfg.heading_jitter = get_double(kv, "heading_jitter");
  cfg.drop_rate = get_double(kv, "drop_rate");
  cfg.spawn_rate = get_double(kv, "spawn_rate");
  const std::string & seed = get_string(kv, "seed");
  try {
    std::size_t used = 0;
    cfg.seed = std::stoull(seed, &used);
    if (used != seed.size()) {
      throw std::invalid_argument(seed);
    }
  } catch (const std::exception &) {
    throw ParseError("seed must be a non-negative integer", 0);
  }
  cfg.class_label = get_string(kv, "class");
  validate(cfg);
  return cfg;
}

}  // namespace crossdet::simulate
