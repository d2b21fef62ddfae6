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

#include "feemarket/mechanism.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace feemarket {
namespace {

Transaction Tx(std::uint64_t id, FeeAmount::Rep bid)
{
  Transaction tx;
  tx.id  = id;
  tx.bid = FeeAmount{bid};
  return tx;
}

std::vector<FeeAmount::Rep> Payments(AuctionOutcome const &outcome)
{
  std::vector<FeeAmount::Rep> out;
  for (auto const &p : outcome.included)
  {
    out.push_back(p.amount.units());
  }
  return out;
}

ProtocolParams Params(std::uint32_t k, FeeAmount::Rep min_fee = 0)
{
  ProtocolParams params;
  params.k_priced_slots = k;
  params.capacity       = k;
  params.min_fee        = FeeAmount{min_fee};
  return params;
}

TEST(FeeAmountTest, CheckedArithmetic)
{
  EXPECT_THROW(FeeAmount{-1}, Error);
  FeeAmount const big{std::numeric_limits<FeeAmount::Rep>::max()};
  try
  {
    (void)(big + FeeAmount{1});
    FAIL() << "expected overflow";
  }
  catch (Error const &e)
  {
    EXPECT_EQ(e.code(), ErrorCode::kOverflow);
  }
  EXPECT_THROW((void)(big * 2), Error);
  EXPECT_EQ((FeeAmount{7} * 3).units(), 21);
  EXPECT_EQ(FeeAmount::FromValue(0.7, 1e8).units(), 70000000);
  EXPECT_EQ(FeeAmount::FromValue(2.5, 1.0).units(), 2);  // ties to even
}

TEST(AllocateTopKTest, SortsByBid)
{
  std::vector<Transaction> bids{Tx(1, 5), Tx(2, 3), Tx(3, 4)};
  auto const               top = AllocateTopK(bids, 2);
  ASSERT_EQ(top.size(), 2U);
  EXPECT_EQ(top[0].id, 1U);
  EXPECT_EQ(top[1].id, 3U);
}

TEST(AllocateTopKTest, FewerBidsThanSlots)
{
  std::vector<Transaction> bids{Tx(1, 5)};
  auto const               top = AllocateTopK(bids, 3);
  ASSERT_EQ(top.size(), 1U);
  EXPECT_EQ(top[0].bid.units(), 5);
}

TEST(AllocateTopKTest, TieGoesToHigherIdForEveryInputOrder)
{
  // a:5 (id 1), b:5 (id 2), c:4 (id 3); b must win a single slot regardless
  // of the order the mempool is presented in
  std::vector<Transaction> bids{Tx(1, 5), Tx(2, 5), Tx(3, 4)};
  std::sort(bids.begin(), bids.end(), [](auto const &x, auto const &y) { return x.id < y.id; });
  int permutations = 0;
  do
  {
    auto const top = AllocateTopK(bids, 1);
    ASSERT_EQ(top.size(), 1U);
    EXPECT_EQ(top[0].id, 2U);
    ++permutations;
  } while (std::next_permutation(bids.begin(), bids.end(),
                                 [](auto const &x, auto const &y) { return x.id < y.id; }));
  EXPECT_EQ(permutations, 6);
}

TEST(AllocateTopKTest, PureFunction)
{
  std::mt19937_64          gen{3};
  std::vector<Transaction> bids;
  for (std::uint64_t i = 0; i < 200; ++i)
  {
    bids.push_back(Tx(i, static_cast<FeeAmount::Rep>(gen() % 20)));
  }
  auto const a = AllocateTopK(bids, 50);
  std::shuffle(bids.begin(), bids.end(), gen);
  auto const b = AllocateTopK(bids, 50);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    EXPECT_EQ(a[i].id, b[i].id);
  }
}

TEST(PriceGfpTest, PayOwnBid)
{
  std::vector<Transaction> winners{Tx(1, 5), Tx(2, 4), Tx(3, 3)};
  auto const               out = PriceGfp(winners);
  EXPECT_EQ(Payments(out), (std::vector<FeeAmount::Rep>{5, 4, 3}));
  EXPECT_EQ(out.miner_revenue.units(), 12);
  EXPECT_EQ(out.clearing_price.units(), 3);
  EXPECT_EQ(out.fill_penalty.units(), 0);

  std::vector<Transaction> single{Tx(1, 7)};
  EXPECT_EQ(PriceGfp(single).miner_revenue.units(), 7);
  EXPECT_EQ(PriceGfp({}).miner_revenue.units(), 0);
}

TEST(PriceGspTest, UniformPriceAtKPlusFirstBid)
{
  std::vector<Transaction> bids{Tx(1, 5), Tx(2, 4), Tx(3, 3), Tx(4, 2), Tx(5, 1)};
  auto const               out = PriceGspUniform(bids, 3);
  EXPECT_EQ(Payments(out), (std::vector<FeeAmount::Rep>{2, 2, 2}));
  EXPECT_EQ(out.miner_revenue.units(), 6);
}

TEST(PriceGspTest, InsufficientBids)
{
  std::vector<Transaction> bids{Tx(1, 5), Tx(2, 4)};
  try
  {
    PriceGspUniform(bids, 2);
    FAIL() << "expected INSUFFICIENT_BIDS";
  }
  catch (Error const &e)
  {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientBids);
  }
}

TEST(PriceGspTest, AllEqual)
{
  std::vector<Transaction> bids{Tx(1, 9), Tx(2, 9), Tx(3, 9), Tx(4, 9)};
  auto const               out = PriceGspUniform(bids, 3);
  EXPECT_EQ(Payments(out), (std::vector<FeeAmount::Rep>{9, 9, 9}));
  EXPECT_EQ(out.miner_revenue.units(), 27);
}

TEST(PriceProposedTest, FullBlock)
{
  std::vector<Transaction> included{Tx(1, 5), Tx(2, 4), Tx(3, 3)};
  auto const               out = PriceProposed(included, Params(3), false);
  EXPECT_EQ(Payments(out), (std::vector<FeeAmount::Rep>{3, 3, 3}));
  EXPECT_EQ(out.miner_revenue.units(), 9);
  EXPECT_EQ(out.fill_penalty.units(), 0);
  EXPECT_EQ(out.fill_status, FillStatus::kFull);
}

TEST(PriceProposedTest, FillPenalty)
{
  std::vector<Transaction> included{Tx(1, 5), Tx(2, 4)};
  auto const               out = PriceProposed(included, Params(3), false);
  EXPECT_EQ(Payments(out), (std::vector<FeeAmount::Rep>{4, 4}));
  EXPECT_EQ(out.fill_penalty.units(), 4);
  EXPECT_EQ(out.miner_revenue.units(), 12);
  EXPECT_EQ(out.fill_status, FillStatus::kPenalized);
  EXPECT_EQ(BlockRevenue(out).units(), 12);
}

TEST(PriceProposedTest, DeclaredUnderfull)
{
  std::vector<Transaction> included{Tx(1, 5), Tx(2, 4)};
  auto const               out = PriceProposed(included, Params(3, 1), true);
  EXPECT_EQ(Payments(out), (std::vector<FeeAmount::Rep>{1, 1}));
  EXPECT_EQ(out.fill_penalty.units(), 0);
  EXPECT_EQ(out.miner_revenue.units(), 2);
  EXPECT_EQ(out.fill_status, FillStatus::kDeclaredUnderfull);
}

TEST(PriceProposedTest, BidBelowMinimum)
{
  std::vector<Transaction> included{Tx(1, 5), Tx(2, 1)};
  try
  {
    PriceProposed(included, Params(3, 2), false);
    FAIL() << "expected BID_BELOW_MINIMUM";
  }
  catch (Error const &e)
  {
    EXPECT_EQ(e.code(), ErrorCode::kBidBelowMinimum);
  }
}

TEST(PriceProposedTest, UnpricedExtrasPayNothing)
{
  ProtocolParams params = Params(2);
  params.capacity       = 4;
  std::vector<Transaction> priced{Tx(1, 9), Tx(2, 8)};
  std::vector<Transaction> extras{Tx(3, 1), Tx(4, 0)};
  auto                     out = PriceProposed(priced, params, false);
  AddUnpricedExtras(out, params, extras);
  EXPECT_EQ(out.unpriced_extras, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(out.clearing_price.units(), 8);
  EXPECT_EQ(BlockRevenue(out).units(), 16);
  std::vector<Transaction> one_more{Tx(5, 1)};
  EXPECT_THROW(AddUnpricedExtras(out, params, one_more), Error);
}

TEST(BlockRevenueTest, Examples)
{
  AuctionOutcome a;
  a.included = {{1, FeeAmount{3}}, {2, FeeAmount{3}}, {3, FeeAmount{3}}};
  EXPECT_EQ(BlockRevenue(a).units(), 9);

  AuctionOutcome b;
  b.included     = {{1, FeeAmount{4}}, {2, FeeAmount{4}}};
  b.fill_penalty = FeeAmount{4};
  EXPECT_EQ(BlockRevenue(b).units(), 12);

  EXPECT_EQ(BlockRevenue(AuctionOutcome{}).units(), 0);
}

// Properties over random bid multisets.
TEST(MechanismProperties, PricingRulesAgreeOnAllocation)
{
  std::mt19937_64 gen{11};
  for (int instance = 0; instance < 500; ++instance)
  {
    std::size_t const        n = 2 + gen() % 30;
    std::size_t const        k = 1 + gen() % (n - 1);
    std::vector<Transaction> bids;
    for (std::uint64_t i = 0; i < n; ++i)
    {
      bids.push_back(Tx(i + 1, static_cast<FeeAmount::Rep>(gen() % 50)));
    }
    auto const winners  = AllocateTopK(bids, k);
    auto const gfp      = PriceGfp(winners);
    auto const proposed = PriceProposed(winners, Params(static_cast<std::uint32_t>(k)), false);
    auto const gsp      = PriceGspUniform(bids, k);

    ASSERT_EQ(gfp.included.size(), k);
    for (std::size_t i = 0; i < k; ++i)
    {
      EXPECT_EQ(gfp.included[i].tx_id, winners[i].id);
      EXPECT_EQ(proposed.included[i].tx_id, winners[i].id);
      EXPECT_EQ(gsp.included[i].tx_id, winners[i].id);
      // individual rationality and uniform clearing price
      EXPECT_LE(proposed.included[i].amount, winners[i].bid);
      EXPECT_EQ(proposed.included[i].amount, proposed.clearing_price);
      EXPECT_LE(gsp.included[i].amount, winners[i].bid);
      EXPECT_EQ(gfp.included[i].amount, winners[i].bid);
    }
    EXPECT_EQ(proposed.clearing_price, winners.back().bid);
    EXPECT_GE(gfp.miner_revenue, proposed.miner_revenue);

    // losers never bid above the GSP clearing price
    for (auto const &tx : bids)
    {
      bool const won = std::any_of(winners.begin(), winners.end(),
                                   [&](auto const &w) { return w.id == tx.id; });
      if (!won)
      {
        EXPECT_LE(tx.bid, gsp.clearing_price);
      }
    }
  }
}

}  // namespace
}  // namespace feemarket
