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


#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace oracles
{

using crossdet::geom::Box3D;

bool bev_contains(const Box3D & box, double x, double y)
{
  const double dx = x - box.cx;
  const double dy = y - box.cy;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  return std::abs(u) <= box.length / 2.0 && std::abs(v) <= box.width / 2.0;
}

bool contains(const Box3D & box, double x, double y, double z)
{
  return std::abs(z - box.cz) <= box.height / 2.0 && bev_contains(box, x, y);
}

namespace
{

std::array<double, 4> bev_bounds(const Box3D & box)
{
  const double r = std::hypot(box.length, box.width) / 2.0;
  return {box.cx - r, box.cy - r, box.cx + r, box.cy + r};
}

McEstimate finish(std::int64_t both, std::int64_t either)
{
  if (either == 0) {
    return {0.0, 0.0};
  }
  const double n = static_cast<double>(either);
  const double p = static_cast<double>(both) / n;
  return {p, std::max(std::sqrt(p * (1.0 - p) / n), 1.0 / n)};
}

}  // namespace

McEstimate mc_bev_iou(const Box3D & a, const Box3D & b, std::int64_t samples, std::uint64_t seed)
{
  const auto ba = bev_bounds(a);
  const auto bb = bev_bounds(b);
  const double x0 = std::min(ba[0], bb[0]);
  const double y0 = std::min(ba[1], bb[1]);
  const double x1 = std::max(ba[2], bb[2]);
  const double y1 = std::max(ba[3], bb[3]);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1);
  std::uniform_real_distribution<double> uy(y0, y1);
  std::int64_t both = 0;
  std::int64_t either = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    const bool in_a = bev_contains(a, x, y);
    const bool in_b = bev_contains(b, x, y);
    both += (in_a && in_b) ? 1 : 0;
    either += (in_a || in_b) ? 1 : 0;
  }
  return finish(both, either);
}

McEstimate mc_3d_iou(const Box3D & a, const Box3D & b, std::int64_t samples, std::uint64_t seed)
{
  const auto ba = bev_bounds(a);
  const auto bb = bev_bounds(b);
  const double x0 = std::min(ba[0], bb[0]);
  const double y0 = std::min(ba[1], bb[1]);
  const double x1 = std::max(ba[2], bb[2]);
  const double y1 = std::max(ba[3], bb[3]);
  const double z0 = std::min(a.cz - a.height / 2.0, b.cz - b.height / 2.0);
  const double z1 = std::max(a.cz + a.height / 2.0, b.cz + b.height / 2.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1);
  std::uniform_real_distribution<double> uy(y0, y1);
  std::uniform_real_distribution<double> uz(z0, z1);
  std::int64_t both = 0;
  std::int64_t either = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    const double z = uz(rng);
    const bool in_a = contains(a, x, y, z);
    const bool in_b = contains(b, x, y, z);
    both += (in_a && in_b) ? 1 : 0;
    either += (in_a || in_b) ? 1 : 0;
  }
  return finish(both, either);
}

std::pair<double, double> corner_extents(double length, double width, double yaw)
{
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  double min_x = 1e300;
  double max_x = -1e300;
  double min_y = 1e300;
  double max_y = -1e300;
  for (double su : {-0.5, 0.5}) {
    for (double sv : {-0.5, 0.5}) {
      const double u = su * length;
      const double v = sv * width;
      const double x = c * u - s * v;
      const double y = s * u + c * v;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  return {max_x - min_x, max_y - min_y};
}

Box3D random_box(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> dim(0.5, 5.0);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  Box3D box;
  box.cx = pos(rng);
  box.cy = pos(rng);
  box.cz = pos(rng) / 10.0;
  box.length = dim(rng);
  box.width = dim(rng);
  box.height = dim(rng);
  box.yaw = yaw(rng);
  return box;
}

std::pair<Box3D, Box3D> random_box_pair(std::mt19937_64 & rng)
{
  const Box3D a = random_box(rng);
  Box3D b = random_box(rng);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  b.cx = a.cx + off(rng);
  b.cy = a.cy + off(rng);
  b.cz = a.cz + off(rng) / 2.0;
  return {a, b};
}

}  // namespace oracles
