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


#ifndef CROSSDET__TEXT_HPP_
#define CROSSDET__TEXT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crossdet::text
{

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Parses a whole token as a double ('.' decimal point, no locale).
std::optional<double> parse_double(std::string_view token);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string_view> split(std::string_view line, char separator);
std::string_view trim(std::string_view s);

/// Parses "a,b,c" into exactly `count` doubles.
std::optional<std::vector<double>> parse_double_list(std::string_view s, std::size_t count);

}  // namespace crossdet::text

#endif  // CROSSDET__TEXT_HPP_
