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


#include "json.hpp"

#include <string>

#include "crossdet/errors.hpp"
#include "crossdet/ingest.hpp"
#include "crossdet/text.hpp"

namespace crossdet::ingest
{

namespace
{

constexpr std::string_view kUndefined = "—";
constexpr std::string_view kCsvHeader = "metric,difficulty,ap,gt_count,prediction_count";

std::string pad_left(std::string_view s, std::size_t width, std::size_t display_width)
{
  return std::string(width > display_width ? width - display_width : 0, ' ') + std::string(s);
}

std::string table(const metrics::ApReport & report)
{
  constexpr std::size_t kName = 8;
  constexpr std::size_t kCol = 10;
  std::string out = "metric  ";
  for (auto d : metrics::kAllDifficulties) {
    const auto name = metrics::to_string(d);
    out += pad_left(name, kCol, name.size());
  }
  out += '\n';
  for (const auto & [kind, row] : report.cells) {
    std::string name(metrics::to_string(kind));
    name.resize(kName, ' ');
    out += name;
    for (const auto & cell : row) {
      if (cell.ap) {
        const std::string v = text::format_fixed(*cell.ap, 1);
        out += pad_left(v, kCol, v.size());
      } else {
        out += pad_left(kUndefined, kCol, 1);
      }
    }
    out += '\n';
  }
  return out;
}

std::string csv(const metrics::ApReport & report)
{
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto & [kind, row] : report.cells) {
    for (auto d : metrics::kAllDifficulties) {
      const auto & cell = row[static_cast<std::size_t>(d)];
      out += std::string(metrics::to_string(kind)) + ',' + std::string(metrics::to_string(d)) +
        ',' + (cell.ap ? text::format_double(*cell.ap) : std::string(kUndefined)) + ',' +
        std::to_string(cell.gt_count) + ',' + std::to_string(cell.prediction_count) + '\n';
    }
  }
  return out;
}

std::string structured(const metrics::ApReport & report)
{
  nlohmann::ordered_json doc;
  doc["recall_points"] = report.recall_points;
  auto & cells = doc["cells"] = nlohmann::ordered_json::array();
  for (const auto & [kind, row] : report.cells) {
    for (auto d : metrics::kAllDifficulties) {
      const auto & cell = row[static_cast<std::size_t>(d)];
      nlohmann::ordered_json c;
      c["metric"] = metrics::to_string(kind);
      c["difficulty"] = metrics::to_string(d);
      c["ap"] = cell.ap ? nlohmann::ordered_json(*cell.ap) : nlohmann::ordered_json(nullptr);
      c["gt_count"] = cell.gt_count;
      c["prediction_count"] = cell.prediction_count;
      auto & curve = c["curve"] = nlohmann::ordered_json::array();
      for (const auto & pt : cell.curve.points) {
        curve.push_back({{"score", pt.score_cutoff}, {"precision", pt.precision},
            {"recall", pt.recall}});
      }
      cells.push_back(std::move(c));
    }
  }
  return doc.dump(2) + '\n';
}

std::size_t parse_count(std::string_view token, std::size_t line_no)
{
  auto v = text::parse_double(token);
  if (!v || *v < 0.0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
    throw ParseError("csv line " + std::to_string(line_no) + ": bad count", line_no);
  }
  return static_cast<std::size_t>(*v);
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(std::string_view name)
{
  if (name == "table") {
    return ReportFormat::kTable;
  }
  if (name == "csv") {
    return ReportFormat::kCsv;
  }
  if (name == "json-like" || name == "json") {
    return ReportFormat::kStructured;
  }
  return std::nullopt;
}

std::string write_report(const metrics::ApReport & report, ReportFormat format)
{
  switch (format) {
    case ReportFormat::kTable:
      return table(report);
    case ReportFormat::kCsv:
      return csv(report);
    case ReportFormat::kStructured:
      return structured(report);
  }
  return {};
}

std::vector<CsvReportRow> parse_report_csv(std::string_view content)
{
  std::vector<CsvReportRow> rows;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty()) {
      continue;
    }
    if (line_no == 1) {
      if (line != kCsvHeader) {
        throw ParseError("csv header mismatch", 1);
      }
      continue;
    }
    const auto fields = text::split(line, ',');
    if (fields.size() != 5) {
      throw ParseError("csv line " + std::to_string(line_no) + ": expected 5 fields", line_no);
    }
    CsvReportRow row;
    auto metric = metrics::metric_from_string(fields[0]);
    auto difficulty = metrics::difficulty_from_string(fields[1]);
    if (!metric || !difficulty) {
      throw ParseError("csv line " + std::to_string(line_no) + ": unknown metric or difficulty",
              line_no);
    }
    row.metric = *metric;
    row.difficulty = *difficulty;
    if (fields[2] != kUndefined) {
      row.ap = text::parse_double(fields[2]);
      if (!row.ap) {
        throw ParseError("csv line " + std::to_string(line_no) + ": bad ap", line_no);
      }
    }
    row.gt_count = parse_count(fields[3], line_no);
    row.prediction_count = parse_count(fields[4], line_no);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace crossdet::ingest
