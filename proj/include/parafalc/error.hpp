// Copyright 2026 The parafalc Authors.
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

#ifndef PARAFALC_ERROR_HPP
#define PARAFALC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace parafalc {

enum class ErrorCode {
  kNotPrime,
  kEvenCharacteristic,
  kReduciblePolynomial,
  kMixedFields,
  kDivisionByZero,
  kNonDivisorDegree,
  kDimensionOutOfRange,
  kDependentBasis,
  kInvalidElement,
  kDuplicatePoint,
  kEmptySet,
  kDomainError,
  kInfeasibleParameters,
  kParseError,
  kToleranceExceeded,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kEvenCharacteristic: return "EvenCharacteristic";
    case ErrorCode::kReduciblePolynomial: return "ReduciblePolynomial";
    case ErrorCode::kMixedFields: return "MixedFields";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kNonDivisorDegree: return "NonDivisorDegree";
    case ErrorCode::kDimensionOutOfRange: return "DimensionOutOfRange";
    case ErrorCode::kDependentBasis: return "DependentBasis";
    case ErrorCode::kInvalidElement: return "InvalidElement";
    case ErrorCode::kDuplicatePoint: return "DuplicatePoint";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kInfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kToleranceExceeded: return "ToleranceExceeded";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code identifies the violated
/// contract; the message names the offending values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace parafalc

#endif  // PARAFALC_ERROR_HPP
