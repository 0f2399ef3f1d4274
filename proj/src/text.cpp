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


#include "crossdet/text.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace crossdet::text
{

std::string format_double(double value)
{
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string format_fixed(double value, int decimals)
{
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(
    buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
  std::string out(buf.data(), end);
  if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);  // no "-0.0"
  }
  return out;
}

std::optional<double> parse_double(std::string_view token)
{
  if (token.empty()) {
    return std::nullopt;
  }
  // from_chars rejects a leading '+', which hand-written files do use.
  if (token.front() == '+') {
    token.remove_prefix(1);
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split_whitespace(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_space = [](char c) {return c == ' ' || c == '\t' || c == '\r' || c == '\n';};
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) {
      ++j;
    }
    if (j > i) {
      out.push_back(line.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view line, char separator)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(separator, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::vector<double>> parse_double_list(std::string_view s, std::size_t count)
{
  std::vector<double> out;
  for (std::string_view part : split(s, ',')) {
    auto v = parse_double(trim(part));
    if (!v) {
      return std::nullopt;
    }
    out.push_back(*v);
  }
  if (out.size() != count) {
    return std::nullopt;
  }
  return out;
}

}  // namespace crossdet::text
