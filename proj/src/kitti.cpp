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


#include <cmath>
#include <string>

#include "crossdet/errors.hpp"
#include "crossdet/ingest.hpp"
#include "crossdet/text.hpp"

namespace crossdet::ingest
{

namespace
{

using Mat3 = std::array<double, 9>;
using Vec3 = std::array<double, 3>;

Vec3 mul(const Mat3 & m, const Vec3 & v)
{
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
    m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
    m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

/// Exact inverse via the adjugate. Calibration rotations are orthonormal only
/// to the printed precision, so the transpose is not good enough.
Mat3 inverse(const Mat3 & m)
{
  const Mat3 adj{
    m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
    m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
    m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
  const double det = m[0] * adj[0] + m[1] * adj[3] + m[2] * adj[6];
  Mat3 out{};
  for (std::size_t i = 0; i < 9; ++i) {
    out[i] = adj[i] / det;
  }
  return out;
}

Mat3 rotation_of(const std::array<double, 12> & rt)
{
  return {rt[0], rt[1], rt[2], rt[4], rt[5], rt[6], rt[8], rt[9], rt[10]};
}

Vec3 translation_of(const std::array<double, 12> & rt)
{
  return {rt[3], rt[7], rt[11]};
}

bool orthonormal(const Mat3 & m, double tol)
{
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) {
        dot += m[i * 3 + k] * m[j * 3 + k];
      }
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > tol) {
        return false;
      }
    }
  }
  return true;
}

template<std::size_t N>
std::array<double, N> parse_values(
  const std::vector<std::string_view> & tokens, std::size_t line_no, std::string_view key)
{
  if (tokens.size() != N) {
    throw ParseError(
            "calib line " + std::to_string(line_no) + ": " + std::string(key) + " needs " +
            std::to_string(N) + " values, got " + std::to_string(tokens.size()), line_no);
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    auto v = text::parse_double(tokens[i]);
    if (!v || !std::isfinite(*v)) {
      throw ParseError(
              "calib line " + std::to_string(line_no) + ": non-numeric value '" +
              std::string(tokens[i]) + "'", line_no);
    }
    out[i] = *v;
  }
  return out;
}

}  // namespace

KittiCalib parse_kitti_calib(std::string_view content)
{
  KittiCalib calib;
  bool have_tr = false;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    const auto colon = line.find(':');
    if (line.empty() || colon == std::string_view::npos) {
      continue;
    }
    const std::string_view key = text::trim(line.substr(0, colon));
    const auto tokens = text::split_whitespace(line.substr(colon + 1));
    if (key == "R0_rect" || key == "R_rect") {
      calib.rect = parse_values<9>(tokens, line_no, key);
    } else if (key == "Tr_velo_to_cam" || key == "Tr_velo_cam") {
      calib.velo_to_cam = parse_values<12>(tokens, line_no, key);
      have_tr = true;
    }
  }
  if (!have_tr) {
    throw ParseError("calib has no Tr_velo_to_cam entry", 0);
  }
  validate(calib);
  return calib;
}

void validate(const KittiCalib & calib)
{
  constexpr double kTol = 1e-6;
  if (!orthonormal(calib.rect, kTol)) {
    throw ParseError("R0_rect is not orthonormal", 0);
  }
  if (!orthonormal(rotation_of(calib.velo_to_cam), kTol)) {
    throw ParseError("Tr_velo_to_cam rotation is not orthonormal", 0);
  }
}

geom::Box3D kitti_camera_to_canonical(const KittiCameraBox & cam, const KittiCalib & calib)
{
  const Mat3 rot = rotation_of(calib.velo_to_cam);
  const Vec3 t = translation_of(calib.velo_to_cam);

  const Mat3 rect_inv = inverse(calib.rect);
  const Mat3 rot_inv = inverse(rot);

  const Vec3 p_cam = mul(rect_inv, {cam.x, cam.y, cam.z});
  const Vec3 bottom = mul(rot_inv, {p_cam[0] - t[0], p_cam[1] - t[1], p_cam[2] - t[2]});

  // Object heading: local +x rotated by ry about the (downward) camera y axis.
  const Vec3 heading = mul(rot_inv, mul(rect_inv, {std::cos(cam.ry), 0.0, -std::sin(cam.ry)}));

  return geom::make_box(
    bottom[0], bottom[1], bottom[2] + cam.h / 2.0, cam.l, cam.w, cam.h,
    std::atan2(heading[1], heading[0]));
}

KittiCameraBox canonical_to_kitti_camera(const geom::Box3D & box, const KittiCalib & calib)
{
  geom::validate(box);
  const Mat3 rot = rotation_of(calib.velo_to_cam);
  const Vec3 t = translation_of(calib.velo_to_cam);

  const Vec3 p = mul(rot, {box.cx, box.cy, box.cz - box.height / 2.0});
  const Vec3 p_rect = mul(calib.rect, {p[0] + t[0], p[1] + t[1], p[2] + t[2]});
  const Vec3 heading = mul(calib.rect, mul(rot, {std::cos(box.yaw), std::sin(box.yaw), 0.0}));

  return {box.height, box.width, box.length, p_rect[0], p_rect[1], p_rect[2],
    geom::normalize_yaw(std::atan2(-heading[2], heading[0]))};
}

KittiLabels parse_kitti_label(
  std::string_view content, const KittiCalib & calib, const std::string & frame_id)
{
  validate(calib);
  KittiLabels out;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty()) {
      continue;
    }
    const auto tokens = text::split_whitespace(line);
    if (tokens.size() != 15 && tokens.size() != 16) {
      throw ParseError(
              "label line " + std::to_string(line_no) + ": expected 15 or 16 columns, got " +
              std::to_string(tokens.size()), line_no);
    }
    std::array<double, 15> v{};
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      auto parsed = text::parse_double(tokens[i]);
      if (!parsed || !std::isfinite(*parsed)) {
        throw ParseError(
                "label line " + std::to_string(line_no) + ": column " + std::to_string(i + 1) +
                " is not a finite number: '" + std::string(tokens[i]) + "'", line_no);
      }
      v[i - 1] = *parsed;
    }
    // Columns after the class: truncated, occluded, alpha, bbox[4], h, w, l, x, y, z, ry, score.
    const KittiCameraBox cam{v[7], v[8], v[9], v[10], v[11], v[12], v[13]};
    const std::string label(tokens[0]);
    if (cam.h <= 0.0 || cam.w <= 0.0 || cam.l <= 0.0) {
      if (label == "DontCare") {
        ++out.dropped;
        continue;
      }
      throw ParseError(
              "label line " + std::to_string(line_no) + ": non-positive dimensions", line_no);
    }
    CanonicalRecord rec;
    rec.frame_id = frame_id;
    rec.class_label = label;
    rec.box = kitti_camera_to_canonical(cam, calib);
    if (tokens.size() == 16) {
      rec.score = v[14];
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace crossdet::ingest
