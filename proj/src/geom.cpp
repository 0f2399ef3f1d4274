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


#include "crossdet/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "crossdet/errors.hpp"

namespace crossdet::geom
{

namespace
{

constexpr double kMinArea = 1e-12;

double cross(const Vec2 & o, const Vec2 & a, const Vec2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double clamp_unit(double v)
{
  return std::clamp(v, 0.0, 1.0);
}

void require_polygon(const ConvexPolygon & poly)
{
  if (poly.vertices.size() < 3) {
    throw DegenerateGeometry("polygon has fewer than 3 vertices");
  }
  const double area = signed_area(poly);
  if (!(area >= kMinArea)) {
    throw DegenerateGeometry(
            "polygon area " + std::to_string(area) +
            " is below the minimum (or vertices are not counter-clockwise)");
  }
}

void require_rect(const AlignedRect & r)
{
  if (!(r.area() >= kMinArea)) {
    throw DegenerateGeometry("aligned rectangle has no area");
  }
}

}  // namespace

double normalize_yaw(double yaw)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(yaw, two_pi);
  if (r <= -std::numbers::pi) {
    r += two_pi;
  }
  return r;
}

void validate(const Box3D & box)
{
  const std::array<double, 7> fields{
    box.cx, box.cy, box.cz, box.length, box.width, box.height, box.yaw};
  for (double f : fields) {
    if (!std::isfinite(f)) {
      throw InvalidBox("box has a non-finite field");
    }
  }
  if (box.length <= 0.0 || box.width <= 0.0 || box.height <= 0.0) {
    throw InvalidBox(
            "box dimensions must be positive (got " + std::to_string(box.length) + ", " +
            std::to_string(box.width) + ", " + std::to_string(box.height) + ")");
  }
}

Box3D make_box(
  double cx, double cy, double cz, double length, double width, double height,
  double yaw)
{
  Box3D box{cx, cy, cz, length, width, height, yaw};
  validate(box);
  box.yaw = normalize_yaw(yaw);
  return box;
}

Extents projected_extents(double half_length, double half_width, double yaw)
{
  if (!std::isfinite(half_length) || !std::isfinite(half_width) || !std::isfinite(yaw) ||
    half_length <= 0.0 || half_width <= 0.0)
  {
    throw InvalidBox("half extents must be finite and positive");
  }
  const double s = std::abs(std::sin(yaw));
  const double c = std::abs(std::cos(yaw));
  return {2.0 * (half_width * s + half_length * c), 2.0 * (half_width * c + half_length * s)};
}

AlignedRect side_view_rect(const Box3D & box)
{
  validate(box);
  const Extents e = projected_extents(box.length / 2.0, box.width / 2.0, box.yaw);
  return {box.cx - e.x / 2.0, box.cx + e.x / 2.0, box.cz - box.height / 2.0,
    box.cz + box.height / 2.0};
}

AlignedRect front_view_rect(const Box3D & box)
{
  validate(box);
  const Extents e = projected_extents(box.length / 2.0, box.width / 2.0, box.yaw);
  return {box.cy - e.y / 2.0, box.cy + e.y / 2.0, box.cz - box.height / 2.0,
    box.cz + box.height / 2.0};
}

ConvexPolygon bev_footprint(const Box3D & box)
{
  validate(box);
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = box.length / 2.0;
  const double hw = box.width / 2.0;
  // Local corners in counter-clockwise order; rotation preserves orientation.
  const std::array<Vec2, 4> local{{{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}}};
  ConvexPolygon poly;
  poly.vertices.reserve(4);
  for (const Vec2 & p : local) {
    poly.vertices.push_back({box.cx + c * p.x - s * p.y, box.cy + s * p.x + c * p.y});
  }
  return poly;
}

double signed_area(const ConvexPolygon & poly)
{
  const auto & v = poly.vertices;
  if (v.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 & a = v[i];
    const Vec2 & b = v[(i + 1) % v.size()];
    twice += a.x * b.y - a.y * b.x;
  }
  return twice / 2.0;
}

ConvexPolygon intersect(const ConvexPolygon & subject, const ConvexPolygon & clip)
{
  std::vector<Vec2> out = subject.vertices;
  std::vector<Vec2> in;
  const auto & edges = clip.vertices;
  for (std::size_t i = 0; i < edges.size() && !out.empty(); ++i) {
    const Vec2 & e0 = edges[i];
    const Vec2 & e1 = edges[(i + 1) % edges.size()];
    in.swap(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Vec2 & p = in[j];
      const Vec2 & q = in[(j + 1) % in.size()];
      const double dp = cross(e0, e1, p);
      const double dq = cross(e0, e1, q);
      if (dp >= 0.0) {
        out.push_back(p);
      }
      if ((dp >= 0.0) != (dq >= 0.0)) {
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return ConvexPolygon{std::move(out)};
}

double iou_interval(double a_lo, double a_hi, double b_lo, double b_hi)
{
  const double len_a = a_hi - a_lo;
  const double len_b = b_hi - b_lo;
  if (!(len_a > 0.0) || !(len_b > 0.0)) {
    throw DegenerateGeometry("interval has no length");
  }
  const double inter = std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
  return clamp_unit(inter / (len_a + len_b - inter));
}

double iou_aligned(const AlignedRect & a, const AlignedRect & b)
{
  require_rect(a);
  require_rect(b);
  const double du = std::max(0.0, std::min(a.max_u, b.max_u) - std::max(a.min_u, b.min_u));
  const double dv = std::max(0.0, std::min(a.max_v, b.max_v) - std::max(a.min_v, b.min_v));
  const double inter = du * dv;
  return clamp_unit(inter / (a.area() + b.area() - inter));
}

double iou_rotated(const ConvexPolygon & a, const ConvexPolygon & b)
{
  require_polygon(a);
  require_polygon(b);
  const double area_a = signed_area(a);
  const double area_b = signed_area(b);
  const double inter = std::max(0.0, signed_area(intersect(a, b)));
  return clamp_unit(inter / (area_a + area_b - inter));
}

double iou_bev(const Box3D & a, const Box3D & b)
{
  return iou_rotated(bev_footprint(a), bev_footprint(b));
}

double iou_3d(const Box3D & a, const Box3D & b)
{
  const ConvexPolygon fa = bev_footprint(a);
  const ConvexPolygon fb = bev_footprint(b);
  require_polygon(fa);
  require_polygon(fb);
  const double dz = std::max(
    0.0, std::min(a.cz + a.height / 2.0, b.cz + b.height / 2.0) -
    std::max(a.cz - a.height / 2.0, b.cz - b.height / 2.0));
  if (dz == 0.0) {
    return 0.0;
  }
  const double inter = std::max(0.0, signed_area(intersect(fa, fb))) * dz;
  const double vol_a = a.length * a.width * a.height;
  const double vol_b = b.length * b.width * b.height;
  return clamp_unit(inter / (vol_a + vol_b - inter));
}

double iou_1d_dimension(const Box3D & gt, const Box3D & pred, DimensionAxis axis)
{
  validate(gt);
  validate(pred);
  if (axis == DimensionAxis::kHeight) {
    return iou_interval(
      gt.cz - gt.height / 2.0, gt.cz + gt.height / 2.0,
      pred.cz - pred.height / 2.0, pred.cz + pred.height / 2.0);
  }
  const double dx = pred.cx - gt.cx;
  const double dy = pred.cy - gt.cy;
  const double c = std::cos(gt.yaw);
  const double s = std::sin(gt.yaw);
  double offset = 0.0;
  double gt_extent = 0.0;
  double pred_extent = 0.0;
  if (axis == DimensionAxis::kLength) {
    offset = c * dx + s * dy;
    gt_extent = gt.length;
    pred_extent = pred.length;
  } else {
    offset = -s * dx + c * dy;
    gt_extent = gt.width;
    pred_extent = pred.width;
  }
  return iou_interval(
    -gt_extent / 2.0, gt_extent / 2.0, offset - pred_extent / 2.0, offset + pred_extent / 2.0);
}

}  // namespace crossdet::geom
