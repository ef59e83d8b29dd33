/*
 * Copyright 2026 The monoloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monoloc {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Line and field are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t field = 0)
      : Error(Format(what, line, field)), line_(line), field_(field) {}

  std::size_t line() const { return line_; }
  std::size_t field() const { return field_; }

 private:
  static std::string Format(const std::string& what, std::size_t line,
                            std::size_t field) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (field > 0) out += "field " + std::to_string(field) + ": ";
    return out + what;
  }

  std::size_t line_;
  std::size_t field_;
};

// Well-formed input that violates a semantic constraint (e.g. f <= 0).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Mismatched matrix / batch shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite or exploding objective.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int last_finite_epoch)
      : Error(what), last_finite_epoch_(last_finite_epoch) {}
  int last_finite_epoch() const { return last_finite_epoch_; }

 private:
  int last_finite_epoch_;
};

}  // namespace monoloc
