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
#include "feemarket/manipulation.hpp"
#include "feemarket/mechanism.hpp"
#include "feemarket/strategy.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace feemarket {

struct PopulationConfig
{
  std::size_t       users{1};
  double            arrival_prob{0.5};
  ValueDistribution value_dist{ValueDistribution::Uniform(0.0, 1.0)};
  BidStrategy       strategy{BidStrategy::Truthful()};
  /// Base units per unit of value when bids enter the mechanism.
  double units_per_value{1e8};

  void Validate() const
  {
    if (users == 0)
    {
      throw Error(ErrorCode::kParameter, "population needs at least one user");
    }
    if (!(arrival_prob > 0.0 && arrival_prob < 1.0))
    {
      throw Error(ErrorCode::kParameter, "arrival probability must lie in (0, 1)");
    }
    if (!(units_per_value > 0.0))
    {
      throw Error(ErrorCode::kParameter, "units per value must be positive");
    }
    if (strategy.kind() == BidStrategy::Kind::kOptimalDeviation)
    {
      throw Error(ErrorCode::kParameter, "optimal deviation is not a population strategy");
    }
  }
};

enum class MinerPolicy
{
  kHonest,
  kOptimalManipulator,
};

/// Who mines and how the manipulator values its own block.
struct MinerSetup
{
  std::size_t  miners{1};
  RevenueModel model{RevenueModel::kFullRevenue};
};

/// Trailing-window payout: the miner of a block receives the mean revenue of
/// the last B blocks including its own. Before B blocks exist the mean runs
/// over those available.
class RewardLedger
{
public:
  explicit RewardLedger(std::size_t window)
    : window_{window}
  {
    if (window == 0)
    {
      throw Error(ErrorCode::kParameter, "reward window must be at least 1");
    }
  }

  /// Records a block's revenue and returns that block's miner reward.
  double Push(FeeAmount revenue)
  {
    revenues_.push_back(revenue);
    sum_ += revenue;
    if (revenues_.size() > window_)
    {
      sum_ = sum_ - revenues_.front();
      revenues_.pop_front();
    }
    return static_cast<double>(sum_.units()) / static_cast<double>(revenues_.size());
  }

  std::size_t window() const noexcept
  {
    return window_;
  }

  std::deque<FeeAmount> const &contents() const noexcept
  {
    return revenues_;
  }

private:
  std::size_t           window_;
  std::deque<FeeAmount> revenues_;
  FeeAmount             sum_{};
};

/// A block assembled from a known set of active-user values.
struct BuiltBlock
{
  AuctionOutcome outcome;
  FeeAmount      user_payments{};
  FeeAmount      miner_cost{};        // fees the miner paid on its own fake transactions
  FeeAmount      oracle_max_revenue{};  // truthful pay-own-bid on the top K values
  double         realized_surplus{0.0};
  double         max_surplus{0.0};
};

struct BlockRecord
{
  std::uint64_t  height{0};
  AuctionOutcome outcome;
  FeeAmount      revenue{};
  std::size_t    miner_id{0};
  double         miner_reward{0.0};  // base units; a window mean, so fractional
  double         realized_surplus{0.0};
  double         max_surplus{0.0};
  FeeAmount      oracle_max_revenue{};
  FeeAmount      user_payments{};
  FeeAmount      miner_cost{};
  std::size_t    active_users{0};
};

namespace detail {

constexpr std::uint64_t kFakeIdBase = std::uint64_t{1} << 62U;

inline double SumDescending(std::vector<double> values)
{
  std::sort(values.begin(), values.end(), std::greater<>{});
  double total = 0.0;
  for (double v : values)
  {
    total += v;
  }
  return total;
}

}  // namespace detail

/// Builds one block from the values of the users currently in the mempool.
/// User i gets transaction id i + 1. Bids below the minimum fee are treated
/// as absent from the mempool.
inline BuiltBlock BuildBlock(std::span<double const> values, PopulationConfig const &population,
                             ProtocolParams const &params, MinerPolicy policy,
                             MinerSetup const &miner_setup)
{
  params.Validate();
  std::size_t const k = params.k_priced_slots;
  double const      scale = population.units_per_value;

  std::vector<Transaction> mempool;
  mempool.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    Transaction tx;
    tx.id    = i + 1;
    tx.owner = i;
    tx.bid   = FeeAmount::FromValue(ApplyStrategy(population.strategy, values[i]), scale);
    if (tx.bid >= params.min_fee)
    {
      mempool.push_back(tx);
    }
  }
  std::sort(mempool.begin(), mempool.end(), OutranksForInclusion);

  BuiltBlock out;
  std::size_t priced_real = 0;
  switch (params.pricing)
  {
  case PricingRule::kGfp:
    priced_real = std::min(k, mempool.size());
    out.outcome = PriceGfp(std::span{mempool}.first(priced_real));
    break;
  case PricingRule::kGspKPlus1:
    if (mempool.size() > k)
    {
      priced_real = k;
      out.outcome = PriceGspUniform(mempool, k);
    }
    else
    {
      // no losing bid to price at; the minimum fee plays the (K+1)-th bid
      priced_real             = mempool.size();
      out.outcome             = detail::UniformPrice(mempool, params.min_fee);
      out.outcome.fill_status = FillStatus::kDeclaredUnderfull;
    }
    break;
  case PricingRule::kProposed:
    if (mempool.size() < k)
    {
      priced_real = mempool.size();
      out.outcome = PriceProposed(mempool, params, true);
      break;
    }
    priced_real = k;
    if (policy == MinerPolicy::kOptimalManipulator)
    {
      std::vector<double> bid_units(k);
      for (std::size_t i = 0; i < k; ++i)
      {
        bid_units[i] = static_cast<double>(mempool[i].bid.units());
      }
      ManipulationConfig const cfg{k, miner_setup.miners, params.reward_window,
                                   miner_setup.model, 1};
      priced_real = OptimalManipulation(bid_units, cfg).best_j;
    }
    {
      std::vector<Transaction> included(mempool.begin(),
                                         mempool.begin() + static_cast<std::ptrdiff_t>(priced_real));
      FeeAmount const fake_fee = mempool[priced_real - 1].bid;
      for (std::size_t f = 0; priced_real + f < k; ++f)
      {
        Transaction fake;
        fake.id         = detail::kFakeIdBase + f;
        fake.bid        = fake_fee;
        fake.provenance = Provenance::kFake;
        included.push_back(fake);
        out.miner_cost += fake_fee;
      }
      out.outcome = PriceProposed(included, params, false);
    }
    break;
  }

  if (out.outcome.fill_status == FillStatus::kFull && params.capacity > k)
  {
    std::size_t const extras =
        std::min<std::size_t>(params.capacity - k, mempool.size() - priced_real);
    AddUnpricedExtras(out.outcome, params,
                      std::span{mempool}.subspan(priced_real, extras));
  }

  std::vector<double> included_values;
  included_values.reserve(priced_real);
  for (auto const &p : out.outcome.included)
  {
    if (p.tx_id < detail::kFakeIdBase)
    {
      included_values.push_back(values[p.tx_id - 1]);
      out.user_payments += p.amount;
    }
  }
  out.realized_surplus = detail::SumDescending(std::move(included_values));

  std::vector<double> ranked(values.begin(), values.end());
  std::size_t const   top = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
                    ranked.end(), std::greater<>{});
  ranked.resize(top);
  for (double v : ranked)
  {
    FeeAmount const truthful = FeeAmount::FromValue(v, scale);
    if (truthful >= params.min_fee)
    {
      out.oracle_max_revenue += truthful;
    }
  }
  out.max_surplus = detail::SumDescending(std::move(ranked));
  return out;
}

/// Draws active users, builds the block, and pays its miner from the ledger.
/// Demand comes from rng.Substream(0) and the miner identity from
/// rng.Substream(1), so the demand process does not depend on M.
inline BlockRecord StepBlock(PopulationConfig const &population, ProtocolParams const &params,
                             RewardLedger &ledger, MinerPolicy policy,
                             MinerSetup const &miner_setup, SeededRng rng,
                             std::uint64_t height = 0)
{
  population.Validate();
  if (ledger.window() != params.reward_window)
  {
    throw Error(ErrorCode::kParameter, "ledger window differs from the protocol's B");
  }
  if (miner_setup.miners == 0)
  {
    throw Error(ErrorCode::kParameter, "need at least one miner");
  }

  auto                demand = rng.Substream(0).Open();
  std::vector<double> values;
  for (std::size_t u = 0; u < population.users; ++u)
  {
    if (demand.Bernoulli(population.arrival_prob))
    {
      values.push_back(population.value_dist.Draw(demand));
    }
  }
  auto built = BuildBlock(values, population, params, policy, miner_setup);

  BlockRecord record;
  record.height             = height;
  record.revenue            = BlockRevenue(built.outcome);
  record.outcome            = std::move(built.outcome);
  record.miner_id           = rng.Substream(1).Open().Below(miner_setup.miners);
  record.miner_reward       = ledger.Push(record.revenue);
  record.realized_surplus   = built.realized_surplus;
  record.max_surplus        = built.max_surplus;
  record.oracle_max_revenue = built.oracle_max_revenue;
  record.user_payments      = built.user_payments;
  record.miner_cost         = built.miner_cost;
  record.active_users       = values.size();
  return record;
}

inline double EfficiencyRatio(std::span<BlockRecord const> records)
{
  if (records.empty())
  {
    throw Error(ErrorCode::kDomain, "no blocks");
  }
  double realized = 0.0;
  double best     = 0.0;
  for (auto const &r : records)
  {
    realized += r.realized_surplus;
    best += r.max_surplus;
  }
  return best == 0.0 ? 1.0 : realized / best;
}

/// Realized revenue over the truthful pay-own-bid maximum on the same draws.
inline double RevenueRatio(std::span<BlockRecord const> records)
{
  if (records.empty())
  {
    throw Error(ErrorCode::kDomain, "no blocks");
  }
  FeeAmount revenue{};
  FeeAmount oracle{};
  for (auto const &r : records)
  {
    revenue += r.revenue;
    oracle += r.oracle_max_revenue;
  }
  return oracle.units() == 0 ? 1.0
                             : static_cast<double>(revenue.units()) /
                                   static_cast<double>(oracle.units());
}

struct ChainConfig
{
  PopulationConfig population;
  ProtocolParams   params;
  MinerPolicy      policy{MinerPolicy::kHonest};
  MinerSetup       miner_setup;
  std::size_t      blocks{1};
  std::uint64_t    seed{0};
};

struct ChainSummary
{
  std::size_t         blocks{0};
  FeeAmount           total_revenue{};
  FeeAmount           total_user_payments{};
  FeeAmount           total_fill_penalties{};
  FeeAmount           total_fake_fees{};
  double              total_reward_paid{0.0};
  /// Revenue still owed to future windows when the run stops.
  double              accrued_unpaid{0.0};
  std::vector<double> reward_by_miner;
  double              reward_mean{0.0};
  double              reward_variance{0.0};   // population variance over blocks
  double              revenue_variance{0.0};  // same, block revenue
  double              efficiency_ratio{0.0};
  double              revenue_ratio{0.0};
  bool                conservation_ok{false};  // payments + penalties + fakes == revenue
};

struct ChainRun
{
  std::vector<BlockRecord> records;
  ChainSummary             summary;
};

inline ChainSummary Summarize(std::span<BlockRecord const> records, std::size_t window,
                              std::size_t miners)
{
  ChainSummary s;
  s.blocks = records.size();
  s.reward_by_miner.assign(miners, 0.0);
  double reward_sum  = 0.0;
  double revenue_sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i)
  {
    auto const &r = records[i];
    s.total_revenue += r.revenue;
    s.total_user_payments += r.user_payments;
    s.total_fill_penalties += r.outcome.fill_penalty;
    s.total_fake_fees += r.miner_cost;
    s.total_reward_paid += r.miner_reward;
    s.reward_by_miner.at(r.miner_id) += r.miner_reward;
    reward_sum += r.miner_reward;
    revenue_sum += static_cast<double>(r.revenue.units());

    std::size_t const windows_left = std::min(window, records.size() - i);
    s.accrued_unpaid += static_cast<double>(r.revenue.units()) *
                        static_cast<double>(window - windows_left) / static_cast<double>(window);
  }
  if (!records.empty())
  {
    auto const n       = static_cast<double>(records.size());
    s.reward_mean      = reward_sum / n;
    double const rmean = revenue_sum / n;
    for (auto const &r : records)
    {
      double const dr = r.miner_reward - s.reward_mean;
      double const dv = static_cast<double>(r.revenue.units()) - rmean;
      s.reward_variance += dr * dr / n;
      s.revenue_variance += dv * dv / n;
    }
    s.efficiency_ratio = EfficiencyRatio(records);
    s.revenue_ratio    = RevenueRatio(records);
  }
  s.conservation_ok =
      s.total_user_payments + s.total_fill_penalties + s.total_fake_fees == s.total_revenue;
  return s;
}

/// Sequential chain; block b uses SeededRng{seed, 0}.Substream(b).
inline ChainRun RunChain(ChainConfig const &cfg)
{
  if (cfg.blocks == 0)
  {
    throw Error(ErrorCode::kParameter, "need at least one block");
  }
  cfg.params.Validate();
  RewardLedger ledger{cfg.params.reward_window};
  SeededRng const root{cfg.seed, 0};

  ChainRun run;
  run.records.reserve(cfg.blocks);
  for (std::size_t b = 0; b < cfg.blocks; ++b)
  {
    run.records.push_back(StepBlock(cfg.population, cfg.params, ledger, cfg.policy,
                                    cfg.miner_setup, root.Substream(b), b + 1));
  }
  run.summary = Summarize(run.records, cfg.params.reward_window, cfg.miner_setup.miners);
  return run;
}

}  // namespace feemarket
