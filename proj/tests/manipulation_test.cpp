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

#include "feemarket/manipulation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

namespace feemarket {
namespace {

ManipulationConfig Cfg(std::size_t k, std::size_t m, std::size_t b,
                       RevenueModel model = RevenueModel::kFullRevenue)
{
  return {k, m, b, model, 1};
}

// Second enumeration, written against the definitions directly.
struct Enumerated
{
  std::size_t best_j;
  double      gain;
};

Enumerated EnumerateByHand(std::vector<double> const &bids, std::size_t k, std::size_t m,
                           std::size_t b, RevenueModel model)
{
  double const phi = 1.0 / b + (b - 1.0) / (static_cast<double>(m) * b);
  auto utility     = [&](std::size_t j) {
    double const p     = bids[j - 1];
    double const total = model == RevenueModel::kLiteral       ? p
                         : model == RevenueModel::kUserRevenue ? j * p
                                                               : k * p;
    return phi * total - (k - j) * p;
  };
  std::size_t best_j = k;
  for (std::size_t j = 1; j <= k; ++j)
  {
    if (utility(j) > utility(best_j) || (utility(j) == utility(best_j) && j > best_j))
    {
      best_j = j;
    }
  }
  return {best_j, std::max(0.0, utility(best_j) - utility(k))};
}

TEST(RecoveryFractionTest, Examples)
{
  EXPECT_DOUBLE_EQ(RecoveryFraction(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(RecoveryFraction(2, 2), 0.75);
  EXPECT_NEAR(RecoveryFraction(1000000000, 10), 0.1, 1e-9);
  EXPECT_DOUBLE_EQ(RecoveryFraction(7, 1), 1.0);
  EXPECT_THROW(RecoveryFraction(0, 1), Error);
}

TEST(ManipulationUtilityTest, SmallInstance)
{
  std::vector<double> const bids{100, 2, 1};
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 1, Cfg(3, 1, 1)), 100.0);
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 3, Cfg(3, 1, 1)), 3.0);
  EXPECT_NEAR(ManipulationUtility(bids, 1, Cfg(3, 10, 10)), -143.0, 1e-9);
  EXPECT_NEAR(ManipulationUtility(bids, 3, Cfg(3, 10, 10)), 0.57, 1e-12);
  EXPECT_THROW(ManipulationUtility(bids, 0, Cfg(3, 1, 1)), Error);
  EXPECT_THROW(ManipulationUtility(bids, 4, Cfg(3, 1, 1)), Error);
}

TEST(ManipulationUtilityTest, RevenueModels)
{
  std::vector<double> const bids{100, 2, 1};
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 2, Cfg(3, 1, 1, RevenueModel::kLiteral)), 0.0);
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 2, Cfg(3, 1, 1, RevenueModel::kUserRevenue)), 2.0);
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 2, Cfg(3, 1, 1, RevenueModel::kFullRevenue)), 4.0);
}

TEST(ManipulationUtilityTest, TwoSlotFakeAtTopFee)
{
  // one fake at f1 earns f1 = 10 against 2 f2 = 8 honestly
  std::vector<double> const bids{10, 4};
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 1, Cfg(2, 1, 1)), 10.0);
  EXPECT_DOUBLE_EQ(ManipulationUtility(bids, 2, Cfg(2, 1, 1)), 8.0);
  auto const result = OptimalManipulation(bids, Cfg(2, 1, 1));
  EXPECT_EQ(result.best_j, 1U);
  EXPECT_DOUBLE_EQ(result.gain, 2.0);
}

TEST(OptimalManipulationTest, Examples)
{
  std::vector<double> const bids{100, 2, 1};
  auto const                sole = OptimalManipulation(bids, Cfg(3, 1, 1));
  EXPECT_EQ(sole.best_j, 1U);
  EXPECT_DOUBLE_EQ(sole.gain, 97.0);
  EXPECT_DOUBLE_EQ(sole.honest_utility, 3.0);

  auto const many = OptimalManipulation(bids, Cfg(3, 10, 10));
  EXPECT_EQ(many.best_j, 3U);
  EXPECT_DOUBLE_EQ(many.gain, 0.0);

  std::vector<double> const flat(5, 4.0);
  auto const                none = OptimalManipulation(flat, Cfg(5, 1, 1));
  EXPECT_EQ(none.best_j, 5U);
  EXPECT_DOUBLE_EQ(none.gain, 0.0);

  EXPECT_THROW(OptimalManipulation(bids, Cfg(4, 1, 1)), Error);
}

TEST(OptimalManipulationTest, MatchesIndependentEnumeration)
{
  auto rng = SeededRng{61, 0}.Open();
  for (int instance = 0; instance < 300; ++instance)
  {
    std::size_t const   k = 1 + rng.Below(12);
    std::vector<double> bids(k + rng.Below(5));
    for (auto &b : bids)
    {
      b = static_cast<double>(rng.Below(20));  // integers: plenty of exact ties
    }
    std::sort(bids.begin(), bids.end(), std::greater<>{});
    std::size_t const m = 1 + rng.Below(20);
    std::size_t const b = 1 + rng.Below(20);
    for (auto model : {RevenueModel::kLiteral, RevenueModel::kUserRevenue,
                       RevenueModel::kFullRevenue})
    {
      auto const lib  = OptimalManipulation(bids, Cfg(k, m, b, model));
      auto const hand = EnumerateByHand(bids, k, m, b, model);
      EXPECT_EQ(lib.best_j, hand.best_j);
      EXPECT_NEAR(lib.gain, hand.gain, 1e-9);
      EXPECT_GE(lib.gain, 0.0);
    }
  }
}

TEST(OptimalManipulationTest, GainMonotoneInPhiPerInstance)
{
  auto const dist = FitPowerLaw(2.0, 10.0);
  for (std::uint64_t t = 0; t < 100; ++t)
  {
    auto bids = Sample(dist, 80, {62, t});
    std::sort(bids.begin(), bids.end(), std::greater<>{});
    double const sole = OptimalManipulation(bids, Cfg(40, 1, 1)).gain;
    double const many = OptimalManipulation(bids, Cfg(40, 10, 10)).gain;
    EXPECT_GE(sole, many);
    for (std::size_t b : {1, 10, 50, 100})
    {
      double previous = std::numeric_limits<double>::infinity();
      for (std::size_t m : {1, 10, 100, 1000})
      {
        double const g = OptimalManipulation(bids, Cfg(40, m, b)).gain;
        EXPECT_LE(g, previous);
        previous = g;
      }
    }
  }
}

TEST(GainSweepTest, ShapeAndDeterminism)
{
  auto const               dist = FitPowerLaw(2.0, 10.0);
  std::vector<std::size_t> const miners{1, 10};
  std::vector<std::size_t> const windows{1, 5, 10};
  auto const a = RunGainSweep(dist, 60, 30, miners, windows, 50, {63, 0}, RevenueModel::kFullRevenue, 1);
  auto const b = RunGainSweep(dist, 60, 30, miners, windows, 50, {63, 0}, RevenueModel::kFullRevenue, 3);
  ASSERT_EQ(a.cells.size(), 6U);
  for (std::size_t i = 0; i < a.cells.size(); ++i)
  {
    EXPECT_EQ(a.cells[i].gain.mean, b.cells[i].gain.mean);
    EXPECT_EQ(a.cells[i].gain.std_error, b.cells[i].gain.std_error);
  }
  // M = 1, B = 1 is the largest cell
  for (auto const &cell : a.cells)
  {
    EXPECT_LE(cell.gain.mean, a.cells.front().gain.mean);
  }
  EXPECT_THROW(RunGainSweep(dist, 10, 30, miners, windows, 5, {63, 0}), Error);
}

TEST(SingleBlockCheckTest, Examples)
{
  std::vector<double> const spike{10, 1, 1};
  auto const                a = CheckSingleBlock(spike, 3);
  EXPECT_TRUE(a.profitable);
  ASSERT_TRUE(a.worst_n.has_value());
  EXPECT_EQ(*a.worst_n, 1U);
  EXPECT_FALSE(a.sequential_holds);

  std::vector<double> const flat{3, 3, 3};
  auto const                b = CheckSingleBlock(flat, 3);
  EXPECT_FALSE(b.profitable);
  EXPECT_FALSE(b.worst_n.has_value());
  EXPECT_TRUE(b.sequential_holds);

  EXPECT_THROW(CheckSingleBlock(flat, 4), Error);
}

TEST(SingleBlockCheckTest, SequentialInequalitiesImplyUnprofitable)
{
  auto rng = SeededRng{64, 0}.Open();
  int  sequential_cases = 0;
  for (int instance = 0; instance < 2000; ++instance)
  {
    std::size_t const   k = 2 + rng.Below(10);
    std::vector<double> fees(k);
    for (auto &f : fees)
    {
      f = 0.5 + rng.Uniform01();
    }
    std::sort(fees.begin(), fees.end(), std::greater<>{});
    auto const check = CheckSingleBlock(fees, k);
    if (check.sequential_holds)
    {
      ++sequential_cases;
      EXPECT_FALSE(check.profitable);
    }
  }
  EXPECT_GT(sequential_cases, 0);
}

TEST(SingleBlockCheckTest, ProfitProbabilityFallsWithUsers)
{
  auto const          uniform = ValueDistribution::Uniform(0, 1);
  std::vector<double> probs;
  for (std::size_t users : {50, 100, 200, 400})
  {
    probs.push_back(SingleBlockProfitProbability(uniform, users, 25, 2000, {65, users}, 4).mean);
  }
  EXPECT_TRUE(std::is_sorted(probs.rbegin(), probs.rend()));
}

}  // namespace
}  // namespace feemarket
