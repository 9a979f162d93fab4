// Copyright 2026 The HenonNets Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HENON_ERRORS_HPP
#define HENON_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace henon {

/// Structurally invalid checkpoint, config or metadata content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed CSV line; `line()` is 1-based.
class ParseError : public FormatError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : FormatError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A required input file does not exist or cannot be opened.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace henon

#endif  // HENON_ERRORS_HPP
