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


#ifndef CROSSDET__GEOM_HPP_
#define CROSSDET__GEOM_HPP_

#include <vector>

namespace crossdet::geom
{

struct Vec2
{
  double x{0.0};
  double y{0.0};
};

/// Oriented 3D box in the canonical frame (X forward, Y left, Z up).
///
/// Sizes are full extents. The centre is the
/// geometric centre, so the box spans [cz - height/2, cz + height/2]
/// vertically. `yaw` rotates the local forward axis from +X toward +Y.
struct Box3D
{
  double cx{0.0};
  double cy{0.0};
  double cz{0.0};
  double length{1.0};
  double width{1.0};
  double height{1.0};
  double yaw{0.0};
};

/// Builds a box, normalising yaw into (-pi, pi]. Throws InvalidBox.
Box3D make_box(
  double cx, double cy, double cz, double length, double width, double height,
  double yaw);

/// Throws InvalidBox unless all fields are finite and dimensions positive.
void validate(const Box3D & box);

/// Wraps an angle into (-pi, pi].
double normalize_yaw(double yaw);

struct AlignedRect
{
  double min_u{0.0};
  double max_u{0.0};
  double min_v{0.0};
  double max_v{0.0};

  double area() const {return (max_u - min_u) * (max_v - min_v);}
};

/// Counter-clockwise convex polygon.
struct ConvexPolygon
{
  std::vector<Vec2> vertices;
};

struct Extents
{
  double x{0.0};
  double y{0.0};
};

/// Axis-aligned span of a rotated footprint with the given half extents.
/// Equals 2(w|sin t| + l|cos t|) along X and 2(w|cos t| + l|sin t|) along Y.
Extents projected_extents(double half_length, double half_width, double yaw);

/// Silhouette of the box in the X-Z plane (u = X, v = Z).
AlignedRect side_view_rect(const Box3D & box);

/// Silhouette of the box in the Y-Z plane (u = Y, v = Z).
AlignedRect front_view_rect(const Box3D & box);

ConvexPolygon bev_footprint(const Box3D & box);

/// Shoelace signed area; positive for counter-clockwise vertex order.
double signed_area(const ConvexPolygon & poly);

/// Clips `subject` against every half-plane of `clip`.
ConvexPolygon intersect(const ConvexPolygon & subject, const ConvexPolygon & clip);

double iou_aligned(const AlignedRect & a, const AlignedRect & b);
double iou_rotated(const ConvexPolygon & a, const ConvexPolygon & b);
double iou_bev(const Box3D & a, const Box3D & b);
double iou_3d(const Box3D & a, const Box3D & b);

/// IoU of closed intervals [a_lo, a_hi] and [b_lo, b_hi].
double iou_interval(double a_lo, double a_hi, double b_lo, double b_hi);

enum class DimensionAxis { kLength, kWidth, kHeight };

/// Single-dimension overlap measured in the ground-truth box's local frame.
/// Each box contributes its own stated extent on the chosen axis, centred at
/// its centre's coordinate along that axis.
double iou_1d_dimension(const Box3D & gt, const Box3D & pred, DimensionAxis axis);

}  // namespace crossdet::geom

#endif  // CROSSDET__GEOM_HPP_
