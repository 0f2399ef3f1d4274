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
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "crossdet/errors.hpp"
#include "crossdet/ingest.hpp"
#include "crossdet/text.hpp"

namespace crossdet::ingest
{

namespace
{

CanonicalRecord parse_line(std::string_view line, std::size_t line_no)
{
  const auto tokens = text::split_whitespace(line);
  if (tokens.size() != 9 && tokens.size() != 10) {
    throw ParseError(
            "line " + std::to_string(line_no) + ": expected 9 or 10 fields, got " +
            std::to_string(tokens.size()), line_no);
  }
  static constexpr std::array<std::string_view, 8> kNames{
    "cx", "cy", "cz", "length", "width", "height", "yaw", "score"};
  std::array<double, 8> values{};
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    auto v = text::parse_double(tokens[i]);
    if (!v) {
      throw ParseError(
              "line " + std::to_string(line_no) + ": field '" + std::string(kNames[i - 2]) +
              "' is not a number: '" + std::string(tokens[i]) + "'", line_no);
    }
    values[i - 2] = *v;
  }

  CanonicalRecord rec;
  rec.frame_id = std::string(tokens[0]);
  rec.class_label = std::string(tokens[1]);
  try {
    rec.box = geom::make_box(
      values[0], values[1], values[2], values[3], values[4], values[5], values[6]);
  } catch (const InvalidBox & e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
  if (tokens.size() == 10) {
    if (!std::isfinite(values[7])) {
      throw ParseError("line " + std::to_string(line_no) + ": score is not finite", line_no);
    }
    rec.score = values[7];
  }
  return rec;
}

}  // namespace

CanonicalFile parse_canonical(std::istream & in)
{
  CanonicalFile file;
  std::optional<bool> scored;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = text::trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    CanonicalRecord rec = parse_line(body, line_no);
    const bool has_score = rec.score.has_value();
    if (scored && *scored != has_score) {
      throw ParseError(
              "line " + std::to_string(line_no) +
              ": file mixes scored (prediction) and unscored (ground truth) records",
              line_no);
    }
    scored = has_score;
    file.records.push_back(std::move(rec));
  }
  file.scored = scored.value_or(false);
  return file;
}

CanonicalFile parse_canonical(std::string_view text)
{
  std::istringstream in{std::string(text)};
  return parse_canonical(in);
}

metrics::GtFrames to_gt_frames(const CanonicalFile & file)
{
  if (file.scored) {
    throw InputError("expected ground truth but the records carry scores");
  }
  metrics::GtFrames frames;
  for (const auto & rec : file.records) {
    frames[rec.frame_id].push_back({rec.box, rec.class_label});
  }
  return frames;
}

metrics::PredFrames to_pred_frames(const CanonicalFile & file)
{
  if (!file.scored && !file.records.empty()) {
    throw InputError("expected predictions but the records carry no scores");
  }
  metrics::PredFrames frames;
  for (const auto & rec : file.records) {
    frames[rec.frame_id].push_back({rec.box, rec.class_label, *rec.score});
  }
  return frames;
}

std::string format_record(const CanonicalRecord & record)
{
  const auto & b = record.box;
  std::string out = record.frame_id + ' ' + record.class_label;
  for (double v : {b.cx, b.cy, b.cz, b.length, b.width, b.height, b.yaw}) {
    out += ' ';
    out += text::format_double(v);
  }
  if (record.score) {
    out += ' ';
    out += text::format_double(*record.score);
  }
  return out;
}

void write_canonical(std::ostream & out, const metrics::GtFrames & frames)
{
  for (const auto & [id, objects] : frames) {
    for (const auto & obj : objects) {
      out << format_record({id, obj.class_label, obj.box, std::nullopt}) << '\n';
    }
  }
}

void write_canonical(std::ostream & out, const metrics::PredFrames & frames)
{
  for (const auto & [id, objects] : frames) {
    for (const auto & obj : objects) {
      out << format_record({id, obj.class_label, obj.box, obj.score}) << '\n';
    }
  }
}

}  // namespace crossdet::ingest
