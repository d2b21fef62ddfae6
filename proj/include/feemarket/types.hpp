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

#include "feemarket/error.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace feemarket {

/// Non-negative amount of money in the smallest currency sub-unit.
/// Arithmetic is checked; overflow raises ErrorCode::kOverflow.
class FeeAmount
{
public:
  using Rep = std::int64_t;

  constexpr FeeAmount() = default;

  constexpr explicit FeeAmount(Rep units)
    : units_{units}
  {
    if (units < 0)
    {
      throw Error(ErrorCode::kDomain, "fee amount must be non-negative");
    }
  }

  /// Rounds value * units_per_value to the nearest base unit (ties to even).
  static FeeAmount FromValue(double value, double units_per_value)
  {
    double const scaled = std::nearbyint(value * units_per_value);
    if (!(scaled >= 0.0))
    {
      throw Error(ErrorCode::kDomain, "cannot quantize a negative or NaN value");
    }
    if (scaled >= static_cast<double>(std::numeric_limits<Rep>::max()))
    {
      throw Error(ErrorCode::kOverflow, "value too large to quantize");
    }
    return FeeAmount{static_cast<Rep>(scaled)};
  }

  constexpr Rep units() const noexcept
  {
    return units_;
  }

  double ToValue(double units_per_value) const noexcept
  {
    return static_cast<double>(units_) / units_per_value;
  }

  FeeAmount operator+(FeeAmount other) const
  {
    Rep out{};
    if (__builtin_add_overflow(units_, other.units_, &out))
    {
      throw Error(ErrorCode::kOverflow, "fee addition overflow");
    }
    return FeeAmount{out};
  }

  FeeAmount &operator+=(FeeAmount other)
  {
    *this = *this + other;
    return *this;
  }

  FeeAmount operator-(FeeAmount other) const
  {
    if (other.units_ > units_)
    {
      throw Error(ErrorCode::kDomain, "fee subtraction would go negative");
    }
    return FeeAmount{units_ - other.units_};
  }

  FeeAmount operator*(std::int64_t factor) const
  {
    if (factor < 0)
    {
      throw Error(ErrorCode::kDomain, "negative fee multiplier");
    }
    Rep out{};
    if (__builtin_mul_overflow(units_, factor, &out))
    {
      throw Error(ErrorCode::kOverflow, "fee multiplication overflow");
    }
    return FeeAmount{out};
  }

  constexpr auto operator<=>(FeeAmount const &) const = default;

private:
  Rep units_{0};
};

enum class Provenance
{
  kReal,
  kFake,
};

struct Transaction
{
  std::uint64_t id{0};
  std::uint64_t owner{0};
  FeeAmount     bid{};
  std::uint32_t size_bytes{1};
  Provenance    provenance{Provenance::kReal};
};

enum class PricingRule
{
  kGfp,          // each winner pays its own bid
  kGspKPlus1,    // reference mechanism, uniform price at the (K+1)-th bid
  kProposed,     // uniform price at the minimum included bid
};

struct ProtocolParams
{
  std::uint32_t k_priced_slots{1};
  std::uint32_t capacity{1};
  std::uint32_t reward_window{1};
  FeeAmount     min_fee{};
  PricingRule   pricing{PricingRule::kProposed};

  void Validate() const
  {
    if (k_priced_slots == 0)
    {
      throw Error(ErrorCode::kParameter, "K must be positive");
    }
    if (capacity < k_priced_slots)
    {
      throw Error(ErrorCode::kParameter, "capacity must be at least K");
    }
    if (reward_window == 0)
    {
      throw Error(ErrorCode::kParameter, "reward window must be at least 1");
    }
  }
};

enum class FillStatus
{
  kFull,
  kPenalized,
  kDeclaredUnderfull,
};

constexpr char const *ToString(FillStatus status)
{
  switch (status)
  {
  case FillStatus::kFull:
    return "FULL";
  case FillStatus::kPenalized:
    return "PENALIZED";
  case FillStatus::kDeclaredUnderfull:
    return "DECLARED_UNDERFULL";
  }
  return "UNKNOWN";
}

struct Payment
{
  std::uint64_t tx_id{0};
  FeeAmount     amount{};

  bool operator==(Payment const &) const = default;
};

struct AuctionOutcome
{
  std::vector<Payment>       included;
  FeeAmount                  clearing_price{};
  FeeAmount                  miner_revenue{};
  FeeAmount                  fill_penalty{};
  FillStatus                 fill_status{FillStatus::kFull};
  std::vector<std::uint64_t> unpriced_extras;
};

}  // namespace feemarket
