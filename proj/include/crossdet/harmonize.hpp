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


#ifndef CROSSDET__HARMONIZE_HPP_
#define CROSSDET__HARMONIZE_HPP_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crossdet/ingest.hpp"
#include "crossdet/metrics.hpp"

namespace crossdet::harmonize
{

struct HarmonizeConfig
{
  /// x_min, y_min, z_min, x_max, y_max, z_max in the shifted frame.
  std::array<double, 6> point_range{-75.2, -75.2, -2.0, 75.2, 75.2, 4.0};
  /// Added to every z so that the X-Y plane lies on the ground.
  double vertical_shift{0.0};
  /// Voxel size for downstream detectors. Carried, never used here.
  std::array<double, 3> voxel_size{0.1, 0.1, 0.15};
};

/// Throws InputError on an empty range or non-positive voxel size.
void validate(const HarmonizeConfig & cfg);

/// Suggested ground offsets (metres) per dataset. These are conventions for
/// common sensor mounting heights, not measured values.
double suggested_vertical_shift(std::string_view dataset);

/// Applies `vertical_shift`, then keeps the points inside the closed range.
/// The returned points are in the shifted frame.
ingest::PointCloud clip_range(const ingest::PointCloud & cloud, const HarmonizeConfig & cfg);

ingest::PointCloud shift_vertical(ingest::PointCloud cloud, double dz);
metrics::GtFrames shift_vertical(metrics::GtFrames frames, double dz);
metrics::PredFrames shift_vertical(metrics::PredFrames frames, double dz);

/// Keeps the frames holding at least one ground-truth object of `class_label`.
metrics::GtFrames filter_frames_without_class(
  const metrics::GtFrames & frames, const std::string & class_label);

struct DatasetProfile
{
  std::string name;
  double mean_width{0.0};
  double mean_height{0.0};
  double mean_length{0.0};
  double spread_width{0.0};
  double spread_height{0.0};
  double spread_length{0.0};
};

void validate(const DatasetProfile & profile);

/// Mean and population standard deviation of the target-class box sizes.
/// Throws EmptyInput when there are no such boxes.
DatasetProfile size_statistics(
  const metrics::GtFrames & frames, const std::string & class_label = "Car",
  const std::string & name = "");

struct SizeGap
{
  double width{0.0};
  double height{0.0};
  double length{0.0};
};

/// 100 (source - target) / target per dimension.
SizeGap percentage_gap(const DatasetProfile & source, const DatasetProfile & target);

/// Spread assigned to built-in profiles, as a fraction of each mean.
inline constexpr double kDefaultRelativeSpread = 0.15;

/// Mean car sizes of KITTI, Argoverse, nuScenes, Lyft and Waymo.
const std::map<std::string, DatasetProfile> & builtin_profiles();

/// Looks up a built-in profile by lower-case name. Throws InputError listing
/// the valid names.
DatasetProfile builtin_profile(std::string_view name);

/// Copy of `profile` whose spreads are `relative` times each mean.
DatasetProfile with_relative_spread(DatasetProfile profile, double relative);

// Flat `key = value` text, one entry per line, '#' comments.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues & kv);

KeyValues to_key_values(const HarmonizeConfig & cfg);
HarmonizeConfig harmonize_config_from(const KeyValues & kv);
KeyValues to_key_values(const DatasetProfile & profile);
DatasetProfile dataset_profile_from(const KeyValues & kv);

}  // namespace crossdet::harmonize

#endif  // CROSSDET__HARMONIZE_HPP_
