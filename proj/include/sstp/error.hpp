// Copyright 2026 The Authors.
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

#ifndef SSTP_ERROR_HPP_
#define SSTP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sstp
{

enum class ErrorCode {
  kIo,
  kParse,
  kHorizonMismatch,
  kDuplicateId,
  kFormat,
  kDimensionMismatch,
  kInvalidArgument,
  kBudgetViolation,
  kMembershipViolation,
  kNonFinite,
};

const char * to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` distinguishes the cause.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline const char * to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::kIo:
      return "io error";
    case ErrorCode::kParse:
      return "parse error";
    case ErrorCode::kHorizonMismatch:
      return "horizon mismatch";
    case ErrorCode::kDuplicateId:
      return "duplicate id";
    case ErrorCode::kFormat:
      return "format error";
    case ErrorCode::kDimensionMismatch:
      return "dimension mismatch";
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kBudgetViolation:
      return "budget violation";
    case ErrorCode::kMembershipViolation:
      return "membership violation";
    case ErrorCode::kNonFinite:
      return "non-finite value";
  }
  return "error";
}

}  // namespace sstp

#endif  // SSTP_ERROR_HPP_
