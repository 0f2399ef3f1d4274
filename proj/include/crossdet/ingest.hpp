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


#ifndef CROSSDET__INGEST_HPP_
#define CROSSDET__INGEST_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crossdet/geom.hpp"
#include "crossdet/metrics.hpp"

namespace crossdet::ingest
{

// ---------------------------------------------------------------------------
// Canonical records
//
// One object per line:
//   frame_id class cx cy cz length width height yaw [score]
// whitespace separated, '.' decimal point. A trailing score marks a
// prediction. Blank lines and lines starting with '#' are skipped.
// ---------------------------------------------------------------------------

struct CanonicalRecord
{
  std::string frame_id;
  std::string class_label;
  geom::Box3D box;
  std::optional<double> score;
};

struct CanonicalFile
{
  std::vector<CanonicalRecord> records;
  bool scored{false};
};

/// Throws ParseError carrying the 1-based line number. A file must be all
/// ground truth or all predictions.
CanonicalFile parse_canonical(std::istream & in);
CanonicalFile parse_canonical(std::string_view text);

/// Throws InputError when the file holds predictions.
metrics::GtFrames to_gt_frames(const CanonicalFile & file);
/// Throws InputError when the file holds ground truth.
metrics::PredFrames to_pred_frames(const CanonicalFile & file);

std::string format_record(const CanonicalRecord & record);
void write_canonical(std::ostream & out, const metrics::GtFrames & frames);
void write_canonical(std::ostream & out, const metrics::PredFrames & frames);

// ---------------------------------------------------------------------------
// KITTI
// ---------------------------------------------------------------------------

/// Row-major matrices from a KITTI calibration file.
struct KittiCalib
{
  std::array<double, 9> rect{1, 0, 0, 0, 1, 0, 0, 0, 1};            // R0_rect
  std::array<double, 12> velo_to_cam{0, -1, 0, 0, 0, 0, -1, 0, 1, 0, 0, 0};  // Tr_velo_to_cam
};

/// Reads the `R0_rect:` and `Tr_velo_to_cam:` entries; other keys are
/// ignored. A missing `R0_rect` defaults to identity. Throws ParseError.
KittiCalib parse_kitti_calib(std::string_view text);

/// Throws ParseError unless both rotation blocks are orthonormal to 1e-6.
void validate(const KittiCalib & calib);

/// Object in rectified camera coordinates, KITTI convention: (x, y, z) is the
/// bottom centre. Camera y points down; ry rotates about it.
struct KittiCameraBox
{
  double h{0.0};
  double w{0.0};
  double l{0.0};
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double ry{0.0};
};

geom::Box3D kitti_camera_to_canonical(const KittiCameraBox & cam, const KittiCalib & calib);
KittiCameraBox canonical_to_kitti_camera(const geom::Box3D & box, const KittiCalib & calib);

struct KittiLabels
{
  std::vector<CanonicalRecord> records;
  /// DontCare rows with non-positive dimensions, skipped.
  std::size_t dropped{0};
};

/// Parses 15-column (ground truth) or 16-column (detection) label lines.
KittiLabels parse_kitti_label(
  std::string_view text, const KittiCalib & calib, const std::string & frame_id);

// ---------------------------------------------------------------------------
// Point clouds: consecutive little-endian float32 (x, y, z, intensity).
// ---------------------------------------------------------------------------

struct Point
{
  float x{0.0F};
  float y{0.0F};
  float z{0.0F};
  float intensity{0.0F};

  bool operator==(const Point &) const = default;
};

using PointCloud = std::vector<Point>;

inline constexpr std::size_t kPointRecordBytes = 16;

/// Throws ParseError (byte offset) for a truncated blob or non-finite values.
PointCloud read_pointcloud(std::span<const std::byte> blob);
std::vector<std::byte> write_pointcloud(const PointCloud & cloud);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { kTable, kCsv, kStructured };

std::optional<ReportFormat> report_format_from_string(std::string_view name);

/// Table: one row per metric, easy/moderate/hard columns, one decimal place.
/// CSV: `metric,difficulty,ap,gt_count,prediction_count`, AP printed so it
/// parses back exactly. Structured: JSON with the PR curves. Undefined cells
/// render as U+2014 (table, CSV) or null (JSON).
std::string write_report(const metrics::ApReport & report, ReportFormat format);

struct CsvReportRow
{
  metrics::MetricKind metric{metrics::MetricKind::k3d};
  metrics::Difficulty difficulty{metrics::Difficulty::kEasy};
  std::optional<double> ap;
  std::size_t gt_count{0};
  std::size_t prediction_count{0};
};

std::vector<CsvReportRow> parse_report_csv(std::string_view text);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

/// Throws IoError when the file cannot be read.
std::string read_text_file(const std::filesystem::path & path);
std::vector<std::byte> read_binary_file(const std::filesystem::path & path);
void write_file(const std::filesystem::path & path, std::string_view content);
void write_file(const std::filesystem::path & path, std::span<const std::byte> content);

}  // namespace crossdet::ingest

#endif  // CROSSDET__INGEST_HPP_
