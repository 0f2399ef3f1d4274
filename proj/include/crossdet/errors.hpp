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

#ifndef CROSSDET__ERRORS_HPP_
#define CROSSDET__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossdet
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Box with non-finite fields or non-positive dimensions.
class InvalidBox : public Error
{
public:
  using Error::Error;
};

/// Polygon or rectangle whose area is too small to take part in an IoU.
class DegenerateGeometry : public Error
{
public:
  using Error::Error;
};

/// Malformed input text or binary. `location()` is a 1-based line number for
/// text inputs and a byte offset for binary ones.
class ParseError : public Error
{
public:
  ParseError(const std::string & what, std::size_t location)
  : Error(what), location_(location) {}

  std::size_t location() const noexcept {return location_;}

private:
  std::size_t location_;
};

/// Inputs that parse individually but are inconsistent with each other,
/// e.g. prediction frames that have no ground-truth counterpart.
class InputError : public Error
{
public:
  using Error::Error;
};

class EmptyInput : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

}  // namespace crossdet

#endif  // CROSSDET__ERRORS_HPP_
