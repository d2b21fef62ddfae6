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
#include "feemarket/parallel.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace feemarket {

/// How the block total F_j is counted when a miner keeps j real bids and
/// fills K - j slots with its own transactions priced at the j-th bid p_j.
enum class RevenueModel
{
  kLiteral,      // F_j = p_j
  kUserRevenue,  // F_j = j p_j, real users only
  kFullRevenue,  // F_j = K p_j, fake fees return to the reward pool
};

constexpr std::string_view ToString(RevenueModel model)
{
  switch (model)
  {
  case RevenueModel::kLiteral:
    return "literal";
  case RevenueModel::kUserRevenue:
    return "user";
  case RevenueModel::kFullRevenue:
    return "full";
  }
  return "unknown";
}

struct ManipulationConfig
{
  std::size_t  k{1};
  std::size_t  miners{1};
  std::size_t  window{1};
  RevenueModel revenue_model{RevenueModel::kFullRevenue};
  std::size_t  trials{1};

  void Validate() const
  {
    if (k == 0 || miners == 0 || window == 0 || trials == 0)
    {
      throw Error(ErrorCode::kParameter, "K, M, B and trials must all be at least 1");
    }
  }
};

struct ManipulationResult
{
  std::size_t best_j{0};
  double      best_utility{0.0};
  double      honest_utility{0.0};
  double      gain{0.0};
};

/// Expected share of a block's revenue that flows back to its own miner:
/// 1/B directly plus 1/M of each of the B - 1 later window shares.
inline double RecoveryFraction(std::size_t miners, std::size_t window)
{
  if (miners == 0 || window == 0)
  {
    throw Error(ErrorCode::kDomain, "M and B must be at least 1");
  }
  auto const m = static_cast<double>(miners);
  auto const b = static_cast<double>(window);
  return 1.0 / b + (b - 1.0) / (m * b);
}

/// U(j) = phi F_j - (K - j) p_j.
inline double ManipulationUtility(std::span<double const> bids_desc, std::size_t j,
                                  ManipulationConfig const &cfg)
{
  cfg.Validate();
  if (j < 1 || j > cfg.k || cfg.k > bids_desc.size())
  {
    throw Error(ErrorCode::kDomain, "need 1 <= j <= K <= number of bids");
  }
  double const p = bids_desc[j - 1];
  double       block_total{0.0};
  switch (cfg.revenue_model)
  {
  case RevenueModel::kLiteral:
    block_total = p;
    break;
  case RevenueModel::kUserRevenue:
    block_total = static_cast<double>(j) * p;
    break;
  case RevenueModel::kFullRevenue:
    block_total = static_cast<double>(cfg.k) * p;
    break;
  }
  double const phi = RecoveryFraction(cfg.miners, cfg.window);
  return phi * block_total - static_cast<double>(cfg.k - j) * p;
}

/// Exhaustive search over j in [1, K]; ties go to the larger j.
inline ManipulationResult OptimalManipulation(std::span<double const> bids_desc,
                                              ManipulationConfig const &cfg)
{
  cfg.Validate();
  if (bids_desc.size() < cfg.k)
  {
    throw Error(ErrorCode::kDomain, "fewer bids than K");
  }
  ManipulationResult out;
  out.honest_utility = ManipulationUtility(bids_desc, cfg.k, cfg);
  out.best_j         = cfg.k;
  out.best_utility   = out.honest_utility;
  for (std::size_t j = cfg.k - 1; j >= 1; --j)
  {
    double const u = ManipulationUtility(bids_desc, j, cfg);
    if (u > out.best_utility)
    {
      out.best_utility = u;
      out.best_j       = j;
    }
  }
  out.gain = std::max(0.0, out.best_utility - out.honest_utility);
  return out;
}

struct SweepCell
{
  std::size_t  miners{0};
  std::size_t  window{0};
  MeanEstimate gain;
  MeanEstimate honest_revenue;  // phi-free block total under honesty, K p_K
};

struct GainSweep
{
  std::size_t            mempool{0};
  std::size_t            k{0};
  std::size_t            trials{0};
  RevenueModel           model{RevenueModel::kFullRevenue};
  std::vector<SweepCell> cells;  // row-major: miners outer, window inner
};

/// Mean optimal-manipulation gain over a grid of (M, B).
///
/// Trial t draws one mempool from rng.Substream(t) and evaluates every grid
/// cell on that same mempool, so cells differ only through phi.
inline GainSweep RunGainSweep(ValueDistribution const &dist, std::size_t mempool, std::size_t k,
                              std::span<std::size_t const> miners_grid,
                              std::span<std::size_t const> window_grid, std::size_t trials,
                              SeededRng rng, RevenueModel model = RevenueModel::kFullRevenue,
                              unsigned threads = 1)
{
  if (mempool < k || k == 0)
  {
    throw Error(ErrorCode::kDomain, "mempool must hold at least K >= 1 bids");
  }
  if (trials == 0 || miners_grid.empty() || window_grid.empty())
  {
    throw Error(ErrorCode::kDomain, "empty sweep");
  }
  std::size_t const cells = miners_grid.size() * window_grid.size();

  struct TrialResult
  {
    std::vector<double> gains;
    double              honest_revenue{0.0};
  };
  auto const per_trial = ParallelMap(trials, threads, [&](std::size_t t) {
    auto bids = Sample(dist, mempool, rng.Substream(t));
    std::partial_sort(bids.begin(), bids.begin() + static_cast<std::ptrdiff_t>(k), bids.end(),
                      std::greater<>{});
    TrialResult r;
    r.gains.reserve(cells);
    r.honest_revenue = static_cast<double>(k) * bids[k - 1];
    for (auto m : miners_grid)
    {
      for (auto b : window_grid)
      {
        ManipulationConfig const cfg{k, m, b, model, trials};
        r.gains.push_back(OptimalManipulation(bids, cfg).gain);
      }
    }
    return r;
  });

  GainSweep out{mempool, k, trials, model, {}};
  std::vector<double> column(trials);
  std::vector<double> revenue(trials);
  for (std::size_t t = 0; t < trials; ++t)
  {
    revenue[t] = per_trial[t].honest_revenue;
  }
  auto const revenue_estimate = EstimateMean(revenue);
  std::size_t idx = 0;
  for (auto m : miners_grid)
  {
    for (auto b : window_grid)
    {
      for (std::size_t t = 0; t < trials; ++t)
      {
        column[t] = per_trial[t].gains[idx];
      }
      out.cells.push_back({m, b, EstimateMean(column), revenue_estimate});
      ++idx;
    }
  }
  return out;
}

struct SingleBlockCheck
{
  bool                       profitable{false};
  std::optional<std::size_t> worst_n;            // argmax of n f_n over n < K
  bool                       sequential_holds{false};
};

/// Whether a miner paid its own block's revenue would rather publish n < K
/// transactions at price f_n than K at f_K.
///
/// profitable means some n < K has n f_n >= K f_K. sequential_holds reports
/// whether n f_n > (n - 1) f_(n-1) for every n in [2, K], which rules that out.
inline SingleBlockCheck CheckSingleBlock(std::span<double const> fees_desc, std::size_t k)
{
  if (k == 0 || fees_desc.size() < k)
  {
    throw Error(ErrorCode::kDomain, "need at least K fees");
  }
  SingleBlockCheck out;
  double const honest = static_cast<double>(k) * fees_desc[k - 1];
  double       best   = -1.0;
  for (std::size_t n = 1; n < k; ++n)
  {
    double const restricted = static_cast<double>(n) * fees_desc[n - 1];
    if (restricted > best)
    {
      best        = restricted;
      out.worst_n = n;
    }
  }
  out.profitable = k > 1 && best >= honest;
  if (!out.profitable)
  {
    out.worst_n.reset();
  }

  out.sequential_holds = true;
  for (std::size_t n = 2; n <= k; ++n)
  {
    if (!(static_cast<double>(n) * fees_desc[n - 1] >
          static_cast<double>(n - 1) * fees_desc[n - 2]))
    {
      out.sequential_holds = false;
      break;
    }
  }
  return out;
}

/// Monte-Carlo P(single-block manipulation is profitable) with A truthful
/// users.
inline MeanEstimate SingleBlockProfitProbability(ValueDistribution const &dist, std::size_t users,
                                                 std::size_t k, std::size_t trials, SeededRng rng,
                                                 unsigned threads = 1)
{
  if (users < k || trials == 0)
  {
    throw Error(ErrorCode::kDomain, "need A >= K and at least one trial");
  }
  auto const hits = ParallelMap(trials, threads, [&](std::size_t t) {
    auto fees = Sample(dist, users, rng.Substream(t));
    std::partial_sort(fees.begin(), fees.begin() + static_cast<std::ptrdiff_t>(k), fees.end(),
                      std::greater<>{});
    return CheckSingleBlock(fees, k).profitable ? 1.0 : 0.0;
  });
  return EstimateMean(hits);
}

}  // namespace feemarket
