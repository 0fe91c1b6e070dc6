// Copyright 2026 The Truecase Authors.
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

#ifndef TRUECASE_ERRORS_H_
#define TRUECASE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace truecase {

// Base class for every error raised by the library. The CLI maps these to
// exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input data violates a precondition (empty corpus, bad label, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Operand shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Checkpoint file is malformed. field() names the check that failed
// ("magic", "version", "checksum", "length", "metadata", ...).
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Loss or gradient became NaN/Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace truecase

#endif  // TRUECASE_ERRORS_H_
