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

// Prices one small mempool under the three rules and shows how a lone miner
// and a crowd of miners value withholding transactions.

#include "feemarket/feemarket.hpp"

#include <iostream>
#include <vector>

namespace fm = feemarket;

namespace {

void Print(char const *label, fm::AuctionOutcome const &outcome)
{
  std::cout << label << ": price " << outcome.clearing_price.units() << ", revenue "
            << fm::BlockRevenue(outcome).units() << ", status " << fm::ToString(outcome.fill_status)
            << '\n';
}

}  // namespace

int main()
{
  std::vector<fm::Transaction> mempool;
  for (fm::FeeAmount::Rep bid : {900, 200, 150, 100, 50})
  {
    fm::Transaction tx;
    tx.id  = mempool.size() + 1;
    tx.bid = fm::FeeAmount{bid};
    mempool.push_back(tx);
  }

  fm::ProtocolParams params;
  params.k_priced_slots = 3;
  params.capacity       = 3;

  auto const winners = fm::AllocateTopK(mempool, params.k_priced_slots);
  Print("pay own bid      ", fm::PriceGfp(winners));
  Print("(K+1)-th price   ", fm::PriceGspUniform(mempool, params.k_priced_slots));
  Print("minimum included ", fm::PriceProposed(winners, params, false));

  std::vector<double> const bids{900, 200, 150, 100, 50};
  for (std::size_t miners : {1, 10})
  {
    for (std::size_t window : {1, 10})
    {
      fm::ManipulationConfig const cfg{3, miners, window, fm::RevenueModel::kFullRevenue, 1};
      auto const                   best = fm::OptimalManipulation(bids, cfg);
      std::cout << "M=" << miners << " B=" << window << ": publish " << best.best_j
                << " real transactions, gain " << best.gain << '\n';
    }
  }
  return 0;
}
