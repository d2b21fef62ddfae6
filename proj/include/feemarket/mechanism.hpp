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

#include "feemarket/types.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace feemarket {

/// Strict ordering used for block inclusion: higher bid first, equal bids
/// broken toward the higher transaction id.
inline bool OutranksForInclusion(Transaction const &a, Transaction const &b) noexcept
{
  if (a.bid != b.bid)
  {
    return a.bid > b.bid;
  }
  return a.id > b.id;
}

/// The min(k, |bids|) highest bids, sorted descending.
inline std::vector<Transaction> AllocateTopK(std::span<Transaction const> bids, std::size_t k)
{
  std::vector<Transaction> sorted(bids.begin(), bids.end());
  std::size_t const        take = std::min(k, sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take),
                    sorted.end(), OutranksForInclusion);
  sorted.resize(take);
  return sorted;
}

namespace detail {

inline FeeAmount MinBid(std::span<Transaction const> txs)
{
  auto const it = std::min_element(txs.begin(), txs.end(),
                                   [](auto const &a, auto const &b) { return a.bid < b.bid; });
  return it == txs.end() ? FeeAmount{} : it->bid;
}

inline AuctionOutcome UniformPrice(std::span<Transaction const> winners, FeeAmount price)
{
  AuctionOutcome out;
  out.clearing_price = price;
  out.included.reserve(winners.size());
  for (auto const &tx : winners)
  {
    out.included.push_back({tx.id, price});
  }
  out.miner_revenue = price * static_cast<std::int64_t>(winners.size());
  return out;
}

}  // namespace detail

/// Generalized first price: every winner pays its own bid.
inline AuctionOutcome PriceGfp(std::span<Transaction const> winners)
{
  AuctionOutcome out;
  out.included.reserve(winners.size());
  for (auto const &tx : winners)
  {
    out.included.push_back({tx.id, tx.bid});
    out.miner_revenue += tx.bid;
  }
  out.clearing_price = detail::MinBid(winners);
  return out;
}

/// Generalized second price at the (k+1)-th bid. Needs the losing bids, so it
/// is only usable as an off-chain reference.
inline AuctionOutcome PriceGspUniform(std::span<Transaction const> all_bids, std::size_t k)
{
  if (k == 0)
  {
    throw Error(ErrorCode::kDomain, "k must be positive");
  }
  if (all_bids.size() <= k)
  {
    throw Error(ErrorCode::kInsufficientBids, "the (K+1)-th bid does not exist");
  }
  auto const ranked = AllocateTopK(all_bids, k + 1);
  return detail::UniformPrice(std::span{ranked}.first(k), ranked[k].bid);
}

/// Pay-minimum-included pricing with the fill penalty and the declared
/// underfull branch.
///
/// A block with j < K priced transactions either pays a fill penalty of
/// (K - j) times the clearing price, booked as block revenue, or, if the miner
/// declares the mempool exhausted, charges every user the minimum fee.
inline AuctionOutcome PriceProposed(std::span<Transaction const> included,
                                    ProtocolParams const &params, bool mempool_exhausted)
{
  params.Validate();
  if (included.size() > params.k_priced_slots)
  {
    throw Error(ErrorCode::kDomain, "more priced transactions than K");
  }
  for (auto const &tx : included)
  {
    if (tx.bid < params.min_fee)
    {
      throw Error(ErrorCode::kBidBelowMinimum,
                  "transaction " + std::to_string(tx.id) + " bids below the minimum fee");
    }
  }

  auto const k = static_cast<std::int64_t>(params.k_priced_slots);
  auto const j = static_cast<std::int64_t>(included.size());

  if (j == k)
  {
    return detail::UniformPrice(included, detail::MinBid(included));
  }
  if (mempool_exhausted)
  {
    auto out        = detail::UniformPrice(included, params.min_fee);
    out.fill_status = FillStatus::kDeclaredUnderfull;
    return out;
  }

  // an empty undeclared block has no included fee; the minimum fee stands in
  FeeAmount const price = j == 0 ? params.min_fee : detail::MinBid(included);
  auto            out   = detail::UniformPrice(included, price);
  out.fill_penalty      = price * (k - j);
  out.miner_revenue += out.fill_penalty;
  out.fill_status = FillStatus::kPenalized;
  return out;
}

/// Appends zero-fee transactions to the capacity - K unpriced slots.
inline void AddUnpricedExtras(AuctionOutcome &outcome, ProtocolParams const &params,
                              std::span<Transaction const> extras)
{
  if (outcome.unpriced_extras.size() + extras.size() > params.capacity - params.k_priced_slots)
  {
    throw Error(ErrorCode::kDomain, "unpriced extras exceed capacity - K");
  }
  for (auto const &tx : extras)
  {
    outcome.unpriced_extras.push_back(tx.id);
  }
}

inline FeeAmount BlockRevenue(AuctionOutcome const &outcome)
{
  FeeAmount total = outcome.fill_penalty;
  for (auto const &p : outcome.included)
  {
    total += p.amount;
  }
  return total;
}

}  // namespace feemarket
