// SPDX-License-Identifier: Apache-2.0
//
// Copyright (C) 2026 The tiadc-calib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tiadc {

// Invalid parameters or inconsistent configuration records. CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sequence lengths that do not fit the requested operation. CLI exit code 2.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed capture files or tables. CLI exit code 3.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t byte_offset);
  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

// Numerical failures: singular fits, non-convergence, overflow. CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateFitError : public NumericError {
 public:
  using NumericError::NumericError;
};

class PhaseAmbiguityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class CoefficientOverflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Raised by sinad() when the tone does not sit on an FFT bin.
class CoherenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace tiadc
