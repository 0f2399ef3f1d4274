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


#include "crossdet/harmonize.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <tuple>

#include "crossdet/errors.hpp"
#include "crossdet/text.hpp"

namespace crossdet::harmonize
{

namespace
{

/// Neumaier compensated sum; keeps the statistics stable under reordering.
class CompensatedSum
{
public:
  void add(double x)
  {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const {return sum_ + comp_;}

private:
  double sum_{0.0};
  double comp_{0.0};
};

std::string format_list(std::span<const double> values)
{
  std::string out;
  for (double v : values) {
    if (!out.empty()) {
      out += ',';
    }
    out += text::format_double(v);
  }
  return out;
}

const std::string & require_key(const KeyValues & kv, const std::string & key)
{
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw ParseError("missing key '" + key + "'", 0);
  }
  return it->second;
}

double require_double(const KeyValues & kv, const std::string & key)
{
  auto v = text::parse_double(require_key(kv, key));
  if (!v) {
    throw ParseError("key '" + key + "' is not a number", 0);
  }
  return *v;
}

template<std::size_t N>
std::array<double, N> require_list(const KeyValues & kv, const std::string & key)
{
  auto v = text::parse_double_list(require_key(kv, key), N);
  if (!v) {
    throw ParseError(
            "key '" + key + "' needs " + std::to_string(N) + " comma-separated numbers", 0);
  }
  std::array<double, N> out{};
  std::copy(v->begin(), v->end(), out.begin());
  return out;
}

}  // namespace

void validate(const HarmonizeConfig & cfg)
{
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(cfg.point_range[i] < cfg.point_range[i + 3])) {
      throw InputError("point range minimum must be below maximum on every axis");
    }
    if (!(cfg.voxel_size[i] > 0.0)) {
      throw InputError("voxel sizes must be positive");
    }
  }
  if (!std::isfinite(cfg.vertical_shift)) {
    throw InputError("vertical shift must be finite");
  }
}

double suggested_vertical_shift(std::string_view dataset)
{
  if (dataset == "kitti") {
    return 1.6;
  }
  if (dataset == "nuscenes") {
    return 1.8;
  }
  return 0.0;
}

ingest::PointCloud clip_range(const ingest::PointCloud & cloud, const HarmonizeConfig & cfg)
{
  validate(cfg);
  const auto & r = cfg.point_range;
  ingest::PointCloud out;
  for (ingest::Point p : cloud) {
    p.z = static_cast<float>(static_cast<double>(p.z) + cfg.vertical_shift);
    const double x = p.x;
    const double y = p.y;
    const double z = p.z;
    if (x >= r[0] && x <= r[3] && y >= r[1] && y <= r[4] && z >= r[2] && z <= r[5]) {
      out.push_back(p);
    }
  }
  return out;
}

ingest::PointCloud shift_vertical(ingest::PointCloud cloud, double dz)
{
  for (auto & p : cloud) {
    p.z = static_cast<float>(static_cast<double>(p.z) + dz);
  }
  return cloud;
}

metrics::GtFrames shift_vertical(metrics::GtFrames frames, double dz)
{
  for (auto & [id, objects] : frames) {
    for (auto & obj : objects) {
      obj.box.cz += dz;
    }
  }
  return frames;
}

metrics::PredFrames shift_vertical(metrics::PredFrames frames, double dz)
{
  for (auto & [id, objects] : frames) {
    for (auto & obj : objects) {
      obj.box.cz += dz;
    }
  }
  return frames;
}

metrics::GtFrames filter_frames_without_class(
  const metrics::GtFrames & frames, const std::string & class_label)
{
  metrics::GtFrames out;
  for (const auto & [id, objects] : frames) {
    for (const auto & obj : objects) {
      if (obj.class_label == class_label) {
        out.emplace(id, objects);
        break;
      }
    }
  }
  return out;
}

void validate(const DatasetProfile & p)
{
  for (double m : {p.mean_width, p.mean_height, p.mean_length}) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw InputError("profile means must be positive");
    }
  }
  for (double s : {p.spread_width, p.spread_height, p.spread_length}) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InputError("profile spreads must be non-negative");
    }
  }
}

DatasetProfile size_statistics(
  const metrics::GtFrames & frames, const std::string & class_label, const std::string & name)
{
  std::array<CompensatedSum, 3> sum;
  std::size_t n = 0;
  for (const auto & [id, objects] : frames) {
    for (const auto & obj : objects) {
      if (obj.class_label != class_label) {
        continue;
      }
      sum[0].add(obj.box.width);
      sum[1].add(obj.box.height);
      sum[2].add(obj.box.length);
      ++n;
    }
  }
  if (n == 0) {
    throw EmptyInput("no ground-truth objects of class '" + class_label + "'");
  }
  const double count = static_cast<double>(n);
  const std::array<double, 3> mean{
    sum[0].value() / count, sum[1].value() / count, sum[2].value() / count};

  // Second pass on deviations from the mean.
  std::array<CompensatedSum, 3> sq;
  for (const auto & [id, objects] : frames) {
    for (const auto & obj : objects) {
      if (obj.class_label != class_label) {
        continue;
      }
      const std::array<double, 3> v{obj.box.width, obj.box.height, obj.box.length};
      for (std::size_t i = 0; i < 3; ++i) {
        sq[i].add((v[i] - mean[i]) * (v[i] - mean[i]));
      }
    }
  }
  return {name, mean[0], mean[1], mean[2], std::sqrt(sq[0].value() / count),
    std::sqrt(sq[1].value() / count), std::sqrt(sq[2].value() / count)};
}

SizeGap percentage_gap(const DatasetProfile & source, const DatasetProfile & target)
{
  validate(target);
  auto gap = [](double s, double t) {return 100.0 * (s - t) / t;};
  return {gap(source.mean_width, target.mean_width), gap(source.mean_height, target.mean_height),
    gap(source.mean_length, target.mean_length)};
}

DatasetProfile with_relative_spread(DatasetProfile profile, double relative)
{
  profile.spread_width = relative * profile.mean_width;
  profile.spread_height = relative * profile.mean_height;
  profile.spread_length = relative * profile.mean_length;
  return profile;
}

const std::map<std::string, DatasetProfile> & builtin_profiles()
{
  static const std::map<std::string, DatasetProfile> profiles = [] {
      // name, width, height, length
      const std::array<std::tuple<const char *, double, double, double>, 5> means{{
        {"kitti", 1.62, 1.53, 3.89},
        {"argoverse", 1.96, 1.69, 4.51},
        {"nuscenes", 1.96, 1.73, 4.64},
        {"lyft", 1.91, 1.71, 4.73},
        {"waymo", 2.11, 1.79, 4.80},
      }};
      std::map<std::string, DatasetProfile> out;
      for (const auto & [name, w, h, l] : means) {
        out.emplace(
          name, with_relative_spread({name, w, h, l, 0.0, 0.0, 0.0}, kDefaultRelativeSpread));
      }
      return out;
    }();
  return profiles;
}

DatasetProfile builtin_profile(std::string_view name)
{
  const auto & all = builtin_profiles();
  auto it = all.find(std::string(name));
  if (it == all.end()) {
    std::string names;
    for (const auto & [key, p] : all) {
      names += (names.empty() ? "" : ", ") + key;
    }
    throw InputError("unknown dataset profile '" + std::string(name) + "' (valid: " + names + ")");
  }
  return it->second;
}

KeyValues parse_key_values(std::string_view content)
{
  KeyValues kv;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value", line_no);
    }
    const std::string key(text::trim(line.substr(0, eq)));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty key", line_no);
    }
    if (!kv.emplace(key, std::string(text::trim(line.substr(eq + 1)))).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
              line_no);
    }
  }
  return kv;
}

std::string format_key_values(const KeyValues & kv)
{
  std::string out;
  for (const auto & [k, v] : kv) {
    out += k + " = " + v + '\n';
  }
  return out;
}

KeyValues to_key_values(const HarmonizeConfig & cfg)
{
  return {
    {"point_range", format_list(cfg.point_range)},
    {"vertical_shift", text::format_double(cfg.vertical_shift)},
    {"voxel_size", format_list(cfg.voxel_size)},
  };
}

HarmonizeConfig harmonize_config_from(const KeyValues & kv)
{
  HarmonizeConfig cfg;
  cfg.point_range = require_list<6>(kv, "point_range");
  cfg.vertical_shift = require_double(kv, "vertical_shift");
  cfg.voxel_size = require_list<3>(kv, "voxel_size");
  validate(cfg);
  return cfg;
}

KeyValues to_key_values(const DatasetProfile & p)
{
  return {
    {"name", p.name},
    {"mean_width", text::format_double(p.mean_width)},
    {"mean_height", text::format_double(p.mean_height)},
    {"mean_length", text::format_double(p.mean_length)},
    {"spread_width", text::format_double(p.spread_width)},
    {"spread_height", text::format_double(p.spread_height)},
    {"spread_length", text::format_double(p.spread_length)},
  };
}

DatasetProfile dataset_profile_from(const KeyValues & kv)
{
  DatasetProfile p;
  auto it = kv.find("name");
  p.name = it == kv.end() ? "" : it->second;
  p.mean_width = require_double(kv, "mean_width");
  p.mean_height = require_double(kv, "mean_height");
  p.mean_length = require_double(kv, "mean_length");
  p.spread_width = require_double(kv, "spread_width");
  p.spread_height = require_double(kv, "spread_height");
  p.spread_length = require_double(kv, "spread_length");
  validate(p);
  return p;
}

}  // namespace crossdet::harmonize
