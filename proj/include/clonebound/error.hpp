// Copyright 2026 The clonebound Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clonebound {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  NoConvergence,
  NotNormalized,
  BadPriors,
  EmptyFamily,
  BadExponent,
  DimensionTooLarge,
  DimensionMismatch,
  NoVectors,
  InvalidTask,
  NumericalFailure,
  BadRange,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::BadPriors: return "BadPriors";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoVectors: return "NoVectors";
    case ErrorKind::InvalidTask: return "InvalidTask";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so that callers
/// (notably the CLI) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the numerical kernels rather than of the input.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::NoConvergence ||
           kind_ == ErrorKind::NumericalFailure;
  }

 private:
  ErrorKind kind_;
};

}  // namespace clonebound
