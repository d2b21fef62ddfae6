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

#include "feemarket/strategy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

namespace feemarket {
namespace {

constexpr double kUnits = 1e9;

// Payoff of a bidder with `value` bidding `bid` against truthful rivals under
// minimum-included pricing, run through the mechanism itself. The deviator
// has id 0, so it loses every tie.
double ProposedPayoff(double value, double bid, std::vector<double> const &others, std::size_t k)
{
  std::vector<Transaction> txs;
  for (std::size_t i = 0; i < others.size(); ++i)
  {
    Transaction tx;
    tx.id  = i + 1;
    tx.bid = FeeAmount::FromValue(others[i], kUnits);
    txs.push_back(tx);
  }
  Transaction me;
  me.id  = 0;
  me.bid = FeeAmount::FromValue(bid, kUnits);
  txs.push_back(me);

  ProtocolParams params;
  params.k_priced_slots = static_cast<std::uint32_t>(k);
  params.capacity       = params.k_priced_slots;
  auto const winners    = AllocateTopK(txs, k);
  auto const outcome    = PriceProposed(winners, params, false);
  for (auto const &p : outcome.included)
  {
    if (p.tx_id == 0)
    {
      return value - p.amount.ToValue(kUnits);
    }
  }
  return 0.0;
}

// Grid-search oracle: best grid deviation minus the truthful payoff.
double GridGain(double value, std::vector<double> const &others, std::size_t k, double step,
                double top)
{
  double const truthful = ProposedPayoff(value, value, others, k);
  double       best     = truthful;
  for (double b = 0.0; b <= top; b += step)
  {
    best = std::max(best, ProposedPayoff(value, b, others, k));
  }
  return best - truthful;
}

TEST(ApplyStrategyTest, Examples)
{
  EXPECT_NEAR(ApplyStrategy(BidStrategy::FirstPriceUniformBne(10), 1.0), 0.9, 1e-15);
  EXPECT_EQ(ApplyStrategy(BidStrategy::Truthful(), 0.37), 0.37);
  EXPECT_EQ(ApplyStrategy(BidStrategy::FixedShade(0.0), 5.0), 0.0);
  EXPECT_THROW(BidStrategy::FixedShade(1.5), Error);
  EXPECT_THROW(BidStrategy::FirstPriceUniformBne(1), Error);
}

TEST(ApplyStrategyTest, OptimalDeviationBidsJustAboveKthRival)
{
  std::vector<double> const others{9, 7, 4};
  StrategyContext const     ctx{others, 2};
  double const              bid = ApplyStrategy(BidStrategy::OptimalDeviation(), 10.0, ctx);
  EXPECT_GT(bid, 7.0);
  EXPECT_LT(bid, 7.0 + 1e-12);
  EXPECT_EQ(ApplyStrategy(BidStrategy::OptimalDeviation(), 5.0, ctx), 5.0);
}

TEST(SupStrategicGainTest, Examples)
{
  std::vector<double> const others{9, 7, 4};
  EXPECT_DOUBLE_EQ(SupStrategicGain(10, others, 2), 2.0);
  EXPECT_DOUBLE_EQ(SupStrategicGain(8, others, 2), 1.0);
  EXPECT_DOUBLE_EQ(SupStrategicGain(5, others, 2), 0.0);
  EXPECT_DOUBLE_EQ(SupStrategicGain(7, others, 2), 0.0);  // V_i = V_K
  EXPECT_THROW(SupStrategicGain(5, std::vector<double>{9}, 2), Error);
}

TEST(SupStrategicGainTest, ExamplesAgainstGridOracle)
{
  // values scaled into [0, 1] so a 1e-3 grid resolves them
  std::vector<double> const others{0.9, 0.7, 0.4};
  for (double own : {1.0, 0.8, 0.5})
  {
    double const closed = SupStrategicGain(own, others, 2);
    double const grid   = GridGain(own, others, 2, 1e-3, 1.001);
    EXPECT_NEAR(closed, grid, 1e-3 + 1e-8) << own;
  }
}

TEST(SupStrategicGainTest, BoundedByGapOnRandomInstances)
{
  auto rng = SeededRng{31, 0}.Open();
  for (int instance = 0; instance < 200; ++instance)
  {
    std::size_t const   k = 2 + rng.Below(5);
    std::vector<double> others(k + rng.Below(6));
    for (auto &v : others)
    {
      v = rng.Uniform01();
    }
    std::sort(others.begin(), others.end(), std::greater<>{});
    double const own  = rng.Uniform01();
    double const gain = SupStrategicGain(own, others, k);
    EXPECT_GE(gain, 0.0);
    EXPECT_LE(gain, others[k - 2] - others[k - 1]);
    if (own <= others[k - 1])
    {
      EXPECT_EQ(gain, 0.0);
    }
  }
}

TEST(StrategyProperties, TruthfulIsNotDominantUnderProposedPricing)
{
  // value 1 against rivals 0.9, 0.7, 0.4 with K = 2: truthful pays 0.9,
  // bidding 0.75 pays 0.75
  std::vector<double> const others{0.9, 0.7, 0.4};
  double const              truthful = ProposedPayoff(1.0, 1.0, others, 2);
  double const              shaded   = ProposedPayoff(1.0, 0.75, others, 2);
  EXPECT_NEAR(truthful, 0.1, 1e-9);
  EXPECT_NEAR(shaded, 0.25, 1e-9);
  EXPECT_GT(shaded, truthful);
}

std::vector<double> Grid(double lo, double hi, double step)
{
  std::vector<double> grid;
  for (int i = 0; lo + i * step <= hi + 1e-12; ++i)
  {
    grid.push_back(lo + i * step);
  }
  return grid;
}

TEST(TruthfulDominanceGspTest, Examples)
{
  std::vector<double> const values{5, 4, 3, 2, 1};
  EXPECT_TRUE(TruthfulDominanceCheckGsp(values, 2, Grid(0.0, 6.0, 0.5)));

  std::vector<double> const equal(6, 3.0);
  EXPECT_TRUE(TruthfulDominanceCheckGsp(equal, 2, Grid(0.0, 6.0, 0.5)));

  EXPECT_THROW(TruthfulDominanceCheckGsp(std::vector<double>{1, 2, 3}, 2, Grid(0, 1, 1)), Error);
}

TEST(TruthfulDominanceGspTest, RandomUniformInstances)
{
  auto const grid = Grid(0.0, 1.2, 0.02);
  for (std::uint64_t instance = 0; instance < 100; ++instance)
  {
    auto const values = Sample(ValueDistribution::Uniform(0, 1), 9, {41, instance});
    EXPECT_TRUE(TruthfulDominanceCheckGsp(values, 5, grid)) << instance;
  }
}

TEST(RevenueEquivalenceTest, SmallRun)
{
  auto const cmp = RevenueEquivalenceMc(10, 200000, {51, 0}, 4);
  EXPECT_NEAR(cmp.first_price.mean, 9.0 / 11.0, 4.0 * cmp.first_price.std_error);
  EXPECT_NEAR(cmp.second_price.mean, 9.0 / 11.0, 4.0 * cmp.second_price.std_error);
}

TEST(ExpectedGainBoundTest, MinimalCaseRuns)
{
  auto const est = ExpectedGainBoundMc(ValueDistribution::Uniform(0, 1), 11, 10, 100, {52, 0});
  EXPECT_GT(est.mean, 0.0);
}

TEST(ExpectedGainBoundTest, DecreasingInUsers)
{
  auto const          uniform = ValueDistribution::Uniform(0, 1);
  std::vector<double> means;
  for (std::size_t users : {50, 100, 200, 400})
  {
    auto const est = ExpectedGainBoundMc(uniform, users, 10, 20000, {53, users}, 4);
    means.push_back(est.mean);
  }
  EXPECT_TRUE(std::is_sorted(means.rbegin(), means.rend()));
}

}  // namespace
}  // namespace feemarket
