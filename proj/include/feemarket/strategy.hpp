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

#include "feemarket/distributions.hpp"
#include "feemarket/mechanism.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace feemarket {

class BidStrategy
{
public:
  enum class Kind
  {
    kTruthful,
    kFirstPriceUniformBne,  // single-item first price, N uniform bidders
    kFixedShade,
    kOptimalDeviation,      // best response to known rival bids; test use only
  };

  static BidStrategy Truthful()
  {
    return BidStrategy{Kind::kTruthful, 1.0};
  }

  static BidStrategy FirstPriceUniformBne(std::size_t bidders)
  {
    if (bidders < 2)
    {
      throw Error(ErrorCode::kParameter, "BNE bidding needs N >= 2");
    }
    return BidStrategy{Kind::kFirstPriceUniformBne, static_cast<double>(bidders)};
  }

  static BidStrategy FixedShade(double factor)
  {
    if (!(factor >= 0.0 && factor <= 1.0))
    {
      throw Error(ErrorCode::kParameter, "shade factor must lie in [0, 1]");
    }
    return BidStrategy{Kind::kFixedShade, factor};
  }

  static BidStrategy OptimalDeviation()
  {
    return BidStrategy{Kind::kOptimalDeviation, 0.0};
  }

  Kind kind() const noexcept
  {
    return kind_;
  }

  /// N for the BNE strategy, the factor for FixedShade.
  double parameter() const noexcept
  {
    return param_;
  }

  /// True if the bid is a strictly increasing function of the value.
  bool IsStrictlyIncreasing() const noexcept
  {
    return kind_ == Kind::kTruthful || kind_ == Kind::kFirstPriceUniformBne ||
           (kind_ == Kind::kFixedShade && param_ > 0.0);
  }

private:
  BidStrategy(Kind kind, double param)
    : kind_{kind}
    , param_{param}
  {}

  Kind   kind_;
  double param_;
};

/// What a bidder may know about the auction; only OptimalDeviation reads it.
struct StrategyContext
{
  std::span<double const> others_desc;
  std::size_t             k{0};
};

inline double ApplyStrategy(BidStrategy const &strategy, double value,
                            StrategyContext const &context = {})
{
  switch (strategy.kind())
  {
  case BidStrategy::Kind::kTruthful:
    return value;
  case BidStrategy::Kind::kFirstPriceUniformBne:
  {
    double const n = strategy.parameter();
    return value * (n - 1.0) / n;
  }
  case BidStrategy::Kind::kFixedShade:
    return strategy.parameter() * value;
  case BidStrategy::Kind::kOptimalDeviation:
  {
    if (context.k == 0 || context.others_desc.size() < context.k)
    {
      throw Error(ErrorCode::kDomain, "optimal deviation needs K rival bids");
    }
    double const kth = context.others_desc[context.k - 1];
    // under minimum-included pricing the best bid sits just above the K-th
    // rival bid, which makes that bid the price ceiling
    return value > kth ? std::nextafter(kth, std::numeric_limits<double>::infinity()) : value;
  }
  }
  return value;
}

/// Supremum of the extra payoff a bidder with `own_value` can obtain over
/// truthful bidding under minimum-included pricing, everyone else truthful.
/// With V(K-1), V(K) the (K-1)-th and K-th highest rival bids the answer is
/// 0 below V(K), own_value - V(K) up to V(K-1), and V(K-1) - V(K) above.
inline double SupStrategicGain(double own_value, std::span<double const> others_desc,
                               std::size_t k)
{
  if (k < 2 || others_desc.size() < k)
  {
    throw Error(ErrorCode::kDomain, "need K >= 2 and at least K rival bids");
  }
  double const upper = others_desc[k - 2];
  double const lower = others_desc[k - 1];
  if (own_value <= lower)
  {
    return 0.0;
  }
  if (own_value <= upper)
  {
    return own_value - lower;
  }
  return upper - lower;
}

/// Bound on the expected strategic gain, E[V(K-1) - V(K)] over A draws.
inline MeanEstimate ExpectedGainBoundMc(ValueDistribution const &dist, std::size_t users,
                                        std::size_t k, std::size_t trials, SeededRng rng,
                                        unsigned threads = 1)
{
  return OrderStatGapMc(dist, users, k, trials, rng, threads);
}

/// Checks on one instance that no bidder gains by moving its bid to any grid
/// point under the (K+1)-th price auction. Values and bids are quantized with
/// `units_per_value` and payoffs are compared exactly in base units.
inline bool TruthfulDominanceCheckGsp(std::span<double const> values, std::size_t k,
                                      std::span<double const> deviation_grid,
                                      double units_per_value = 1e9)
{
  if (values.size() < k + 2)
  {
    throw Error(ErrorCode::kDomain, "need at least K + 2 bidders");
  }
  std::vector<Transaction> bids(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    bids[i].id  = i + 1;
    bids[i].bid = FeeAmount::FromValue(values[i], units_per_value);
  }

  auto payoff = [&](std::size_t bidder) -> std::int64_t {
    auto const outcome = PriceGspUniform(bids, k);
    for (auto const &p : outcome.included)
    {
      if (p.tx_id == bidder + 1)
      {
        return FeeAmount::FromValue(values[bidder], units_per_value).units() - p.amount.units();
      }
    }
    return 0;
  };

  for (std::size_t i = 0; i < values.size(); ++i)
  {
    std::int64_t const truthful = payoff(i);
    FeeAmount const    honest   = bids[i].bid;
    for (double d : deviation_grid)
    {
      bids[i].bid = FeeAmount::FromValue(d, units_per_value);
      bool const better = payoff(i) > truthful;
      bids[i].bid       = honest;
      if (better)
      {
        return false;
      }
    }
  }
  return true;
}

struct RevenueComparison
{
  MeanEstimate first_price;   // highest bid, bidders at the uniform BNE
  MeanEstimate second_price;  // second highest value, truthful bidders
  MeanEstimate difference;    // paired first - second
};

/// Single item, N bidders with uniform(0, 1) values. Both auctions share the
/// same value draws in each trial.
inline RevenueComparison RevenueEquivalenceMc(std::size_t bidders, std::size_t trials,
                                              SeededRng rng, unsigned threads = 1)
{
  if (bidders < 2 || trials == 0)
  {
    throw Error(ErrorCode::kDomain, "need N >= 2 bidders and at least one trial");
  }
  auto const uniform = ValueDistribution::Uniform(0.0, 1.0);
  auto const bne     = BidStrategy::FirstPriceUniformBne(bidders);
  struct Trial
  {
    double first{0.0};
    double second{0.0};
  };
  auto const trials_out = ParallelMap(trials, threads, [&](std::size_t t) {
    auto values = Sample(uniform, bidders, rng.Substream(t));
    std::partial_sort(values.begin(), values.begin() + 2, values.end(), std::greater<>{});
    return Trial{ApplyStrategy(bne, values[0]), values[1]};
  });

  std::vector<double> first;
  std::vector<double> second;
  std::vector<double> diff;
  first.reserve(trials);
  second.reserve(trials);
  diff.reserve(trials);
  for (auto const &t : trials_out)
  {
    first.push_back(t.first);
    second.push_back(t.second);
    diff.push_back(t.first - t.second);
  }
  return {EstimateMean(first), EstimateMean(second), EstimateMean(diff)};
}

}  // namespace feemarket
