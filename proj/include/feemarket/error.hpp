//------------------------------------------------------------------------------
//
//   Copyright 2026 The feemarket Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace feemarket {

enum class ErrorCode
{
  kInsufficientBids,
  kBidBelowMinimum,
  kOverflow,
  kDomain,
  kParameter,
  kFit,
  kParse,
  kIo,
};

constexpr std::string_view ToString(ErrorCode code)
{
  switch (code)
  {
  case ErrorCode::kInsufficientBids:
    return "INSUFFICIENT_BIDS";
  case ErrorCode::kBidBelowMinimum:
    return "BID_BELOW_MINIMUM";
  case ErrorCode::kOverflow:
    return "OVERFLOW";
  case ErrorCode::kDomain:
    return "DOMAIN_ERROR";
  case ErrorCode::kParameter:
    return "PARAMETER_ERROR";
  case ErrorCode::kFit:
    return "FIT_ERROR";
  case ErrorCode::kParse:
    return "PARSE_ERROR";
  case ErrorCode::kIo:
    return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, std::string const &message)
    : std::runtime_error(std::string{ToString(code)} + ": " + message)
    , code_{code}
  {}

  ErrorCode code() const noexcept
  {
    return code_;
  }

private:
  ErrorCode code_;
};

}  // namespace feemarket
