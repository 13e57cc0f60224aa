/*
 * Copyright 2026 The xbarc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace xbarc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network / hardware / space / plan document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Shape inference failed (channel mismatch, empty feature map, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inputs are individually valid but do not belong together.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The all-ones duplication vector already exceeds the cell capacity.
class DuplicationInfeasible : public Error {
 public:
  DuplicationInfeasible(std::int64_t deficit)
      : Error("duplication infeasible: single-copy area exceeds capacity by " +
              std::to_string(deficit) + " cells"),
        deficit_(deficit) {}

  std::int64_t deficit() const noexcept { return deficit_; }

 private:
  std::int64_t deficit_;
};

/// Crossbar budget exhausted with boxes left over.
class PackingInfeasible : public Error {
 public:
  PackingInfeasible(const std::string& what, std::size_t unplaced, std::int64_t unplaced_area)
      : Error(what), unplaced_(unplaced), unplaced_area_(unplaced_area) {}

  std::size_t unplaced_count() const noexcept { return unplaced_; }
  std::int64_t unplaced_area() const noexcept { return unplaced_area_; }

 private:
  std::size_t unplaced_;
  std::int64_t unplaced_area_;
};

/// No candidate of a search run fits the hardware budget.
class SearchInfeasible : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace xbarc
