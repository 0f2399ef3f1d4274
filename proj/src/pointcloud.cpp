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


#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "crossdet/errors.hpp"
#include "crossdet/ingest.hpp"

namespace crossdet::ingest
{

namespace
{

float load_le_float(const std::byte * p)
{
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) {
    bits = (bits << 8) | std::to_integer<std::uint32_t>(p[i]);
  }
  return std::bit_cast<float>(bits);
}

void store_le_float(float value, std::byte * p)
{
  auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) {
    p[i] = static_cast<std::byte>(bits & 0xFFU);
    bits >>= 8;
  }
}

}  // namespace

PointCloud read_pointcloud(std::span<const std::byte> blob)
{
  if (blob.size() % kPointRecordBytes != 0) {
    const std::size_t offset = blob.size() - blob.size() % kPointRecordBytes;
    throw ParseError(
            "point cloud is truncated: " + std::to_string(blob.size()) +
            " bytes is not a multiple of 16 (partial record at byte " +
            std::to_string(offset) + ")", offset);
  }
  PointCloud cloud;
  cloud.reserve(blob.size() / kPointRecordBytes);
  for (std::size_t off = 0; off < blob.size(); off += kPointRecordBytes) {
    const std::byte * rec = blob.data() + off;
    Point p{load_le_float(rec), load_le_float(rec + 4), load_le_float(rec + 8),
      load_le_float(rec + 12)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
      !std::isfinite(p.intensity))
    {
      throw ParseError(
              "point " + std::to_string(off / kPointRecordBytes) + " (byte " +
              std::to_string(off) + ") has a non-finite value", off);
    }
    cloud.push_back(p);
  }
  return cloud;
}

std::vector<std::byte> write_pointcloud(const PointCloud & cloud)
{
  std::vector<std::byte> out(cloud.size() * kPointRecordBytes);
  std::byte * p = out.data();
  for (const Point & pt : cloud) {
    store_le_float(pt.x, p);
    store_le_float(pt.y, p + 4);
    store_le_float(pt.z, p + 8);
    store_le_float(pt.intensity, p + 12);
    p += kPointRecordBytes;
  }
  return out;
}

std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::byte> read_binary_file(const std::filesystem::path & path)
{
  const std::string raw = read_text_file(path);
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

void write_file(const std::filesystem::path & path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

void write_file(const std::filesystem::path & path, std::span<const std::byte> content)
{
  write_file(
    path, std::string_view(reinterpret_cast<const char *>(content.data()), content.size()));
}

}  // namespace crossdet::ingest
