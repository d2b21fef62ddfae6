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
#include "feemarket/format.hpp"
#include "feemarket/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace feemarket {

/// One confirmed transaction from a historical block.
/// `fee_paid` is in base units (e.g. satoshi); `day` is YYYY-MM-DD.
struct TxRecord
{
  std::uint64_t block_height{0};
  std::string   day;
  std::string   tx_id;
  std::uint32_t size_bytes{1};
  FeeAmount     fee_paid{};
};

struct TxPayment
{
  std::string tx_id;
  FeeAmount   payment{};
};

struct BlockTotals
{
  std::uint64_t height{0};
  FeeAmount     actual{};
  FeeAmount     counterfactual{};
};

enum class VarianceStatus
{
  kDefined,
  kTooFewBlocks,  // fewer than two blocks that day
};

struct DailyAggregate
{
  std::string    day;
  std::size_t    blocks{0};
  FeeAmount      actual_fees{};
  FeeAmount      counterfactual_fees{};
  FeeAmount      savings{};
  VarianceStatus variance_status{VarianceStatus::kTooFewBlocks};
  double         var_first{std::numeric_limits<double>::quiet_NaN()};   // squared base units
  double         var_second{std::numeric_limits<double>::quiet_NaN()};
  /// var_first / var_second; +inf when only the second is zero, NaN when both are.
  double         variance_ratio{std::numeric_limits<double>::quiet_NaN()};
};

namespace detail {

inline bool IsCalendarDate(std::string_view s)
{
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
  {
    return false;
  }
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
  {
    if (s[i] < '0' || s[i] > '9')
    {
      return false;
    }
  }
  int const month = (s[5] - '0') * 10 + (s[6] - '0');
  int const day   = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

template <typename T>
bool ParseUnsigned(std::string_view text, T &out)
{
  if (text.empty())
  {
    return false;
  }
  auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

inline std::string_view Trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
  {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
  {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> SplitCsv(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t                   start = 0;
  while (true)
  {
    auto const comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
    {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] inline void ParseFailure(std::string const &source, std::size_t line,
                                      std::string const &what)
{
  throw Error(ErrorCode::kParse, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

/// Streaming reader for `height,day,tx_id,size_bytes,fee` rows.
///
/// A header row, blank lines and '#' comments are skipped. Rows of one block
/// must be contiguous, and so must the blocks of one day; both are checked so
/// downstream aggregation never has to buffer more than a day.
class TxCsvReader
{
public:
  TxCsvReader(std::istream &in, std::string source)
    : in_{in}
    , source_{std::move(source)}
  {}

  std::optional<TxRecord> Next()
  {
    std::string line;
    while (std::getline(in_, line))
    {
      ++line_no_;
      auto const view = detail::Trim(line);
      if (view.empty() || view.front() == '#')
      {
        continue;
      }
      if (!seen_row_ && view.starts_with("height"))
      {
        seen_row_ = true;
        continue;
      }
      seen_row_ = true;
      return ParseRow(view);
    }
    return std::nullopt;
  }

  std::size_t line() const noexcept
  {
    return line_no_;
  }

private:
  TxRecord ParseRow(std::string_view view)
  {
    auto const fields = detail::SplitCsv(view);
    if (fields.size() != 5)
    {
      Fail("expected 5 fields, got " + std::to_string(fields.size()));
    }
    TxRecord rec;
    if (!detail::ParseUnsigned(fields[0], rec.block_height))
    {
      Fail("bad block height '" + std::string{fields[0]} + "'");
    }
    if (!detail::IsCalendarDate(fields[1]))
    {
      Fail("bad day '" + std::string{fields[1]} + "', want YYYY-MM-DD");
    }
    rec.day = std::string{fields[1]};
    if (fields[2].empty())
    {
      Fail("empty tx_id");
    }
    rec.tx_id = std::string{fields[2]};
    if (!detail::ParseUnsigned(fields[3], rec.size_bytes) || rec.size_bytes == 0)
    {
      Fail("size_bytes must be a positive integer, got '" + std::string{fields[3]} + "'");
    }
    FeeAmount::Rep fee{};
    if (!detail::ParseUnsigned(fields[4], fee) || fee < 0)
    {
      Fail("fee must be a non-negative integer, got '" + std::string{fields[4]} + "'");
    }
    rec.fee_paid = FeeAmount{fee};
    CheckGrouping(rec);
    return rec;
  }

  void CheckGrouping(TxRecord const &rec)
  {
    if (!current_block_ || *current_block_ != rec.block_height)
    {
      if (!finished_blocks_.insert(rec.block_height).second)
      {
        Fail("block " + std::to_string(rec.block_height) + " rows are not contiguous");
      }
      if (current_day_ != rec.day)
      {
        if (!finished_days_.insert(rec.day).second)
        {
          Fail("day " + rec.day + " rows are not contiguous");
        }
        current_day_ = rec.day;
        // blocks only need to stay unique within the day being streamed
        finished_blocks_.clear();
        finished_blocks_.insert(rec.block_height);
      }
      current_block_ = rec.block_height;
      block_tx_ids_.clear();
    }
    else if (current_day_ != rec.day)
    {
      Fail("block " + std::to_string(rec.block_height) + " spans two days");
    }
    if (!block_tx_ids_.insert(rec.tx_id).second)
    {
      Fail("duplicate tx_id '" + rec.tx_id + "' in block " + std::to_string(rec.block_height));
    }
  }

  [[noreturn]] void Fail(std::string const &what) const
  {
    detail::ParseFailure(source_, line_no_, what);
  }

  std::istream                &in_;
  std::string                  source_;
  std::size_t                  line_no_{0};
  bool                         seen_row_{false};
  std::optional<std::uint64_t> current_block_;
  std::string                  current_day_;
  std::set<std::uint64_t>      finished_blocks_;
  std::set<std::string>        finished_days_;
  std::set<std::string>        block_tx_ids_;
};

inline std::vector<TxRecord> Ingest(std::istream &in, std::string const &source = "<stream>")
{
  TxCsvReader           reader{in, source};
  std::vector<TxRecord> out;
  while (auto rec = reader.Next())
  {
    out.push_back(std::move(*rec));
  }
  return out;
}

inline std::vector<TxRecord> IngestFile(std::string const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(ErrorCode::kIo, "cannot open " + path);
  }
  return Ingest(in, path);
}

/// Round num / den to the nearest integer, ties to even. num >= 0, den > 0.
inline FeeAmount::Rep DivideRoundHalfEven(__int128 num, __int128 den)
{
  __int128 quotient        = num / den;
  __int128 const remainder = num % den;
  if (2 * remainder > den || (2 * remainder == den && quotient % 2 != 0))
  {
    ++quotient;
  }
  if (quotient > std::numeric_limits<FeeAmount::Rep>::max())
  {
    throw Error(ErrorCode::kOverflow, "counterfactual payment overflow");
  }
  return static_cast<FeeAmount::Rep>(quotient);
}

/// Every transaction pays the block's lowest fee per byte times its own size.
/// The lowest rate is found by cross-multiplication, so no float division
/// decides which transaction sets the price.
inline std::vector<TxPayment> CounterfactualPayment(std::span<TxRecord const> block)
{
  if (block.empty())
  {
    throw Error(ErrorCode::kDomain, "empty block");
  }
  auto const lower_rate = [](TxRecord const &a, TxRecord const &b) {
    return static_cast<__int128>(a.fee_paid.units()) * b.size_bytes <
           static_cast<__int128>(b.fee_paid.units()) * a.size_bytes;
  };
  auto const &floor_tx = *std::min_element(block.begin(), block.end(), lower_rate);

  std::vector<TxPayment> out;
  out.reserve(block.size());
  for (auto const &tx : block)
  {
    __int128 const num = static_cast<__int128>(floor_tx.fee_paid.units()) * tx.size_bytes;
    out.push_back({tx.tx_id, FeeAmount{DivideRoundHalfEven(num, floor_tx.size_bytes)}});
  }
  return out;
}

inline BlockTotals SettleBlock(std::span<TxRecord const> block)
{
  BlockTotals totals;
  totals.height = block.front().block_height;
  for (auto const &tx : block)
  {
    totals.actual += tx.fee_paid;
  }
  for (auto const &p : CounterfactualPayment(block))
  {
    totals.counterfactual += p.payment;
  }
  return totals;
}

/// Population variance, computed exactly in integers before the final division.
inline double PopulationVariance(std::span<FeeAmount const> xs)
{
  if (xs.empty())
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  __int128 sum = 0;
  __int128 sum_sq = 0;
  for (auto const &x : xs)
  {
    __int128 const v = x.units();
    sum += v;
    sum_sq += v * v;
  }
  auto const n = static_cast<__int128>(xs.size());
  __int128 const numerator = n * sum_sq - sum * sum;
  return static_cast<double>(static_cast<long double>(numerator) /
                             static_cast<long double>(n * n));
}

/// Savings and variance fields for one day's blocks.
inline DailyAggregate SummarizeDay(std::string day, std::span<BlockTotals const> blocks)
{
  DailyAggregate agg;
  agg.day    = std::move(day);
  agg.blocks = blocks.size();
  std::vector<FeeAmount> first;
  std::vector<FeeAmount> second;
  for (auto const &b : blocks)
  {
    agg.actual_fees += b.actual;
    agg.counterfactual_fees += b.counterfactual;
    first.push_back(b.actual);
    second.push_back(b.counterfactual);
  }
  agg.savings = agg.actual_fees - agg.counterfactual_fees;
  if (blocks.size() >= 2)
  {
    agg.variance_status = VarianceStatus::kDefined;
    agg.var_first       = PopulationVariance(first);
    agg.var_second      = PopulationVariance(second);
    if (agg.var_second > 0.0)
    {
      agg.variance_ratio = agg.var_first / agg.var_second;
    }
    else if (agg.var_first > 0.0)
    {
      agg.variance_ratio = std::numeric_limits<double>::infinity();
    }
  }
  return agg;
}

/// Consumes records in file order and emits one aggregate per day. Holds the
/// current block's transactions and the current day's block totals only.
class DailyReplay
{
public:
  explicit DailyReplay(std::function<void(DailyAggregate)> sink)
    : sink_{std::move(sink)}
  {}

  void Add(TxRecord rec)
  {
    if (!block_.empty() && rec.block_height != block_.front().block_height)
    {
      CloseBlock();
    }
    if (!day_blocks_.empty() && rec.day != day_)
    {
      CloseDay();
    }
    day_ = rec.day;
    block_.push_back(std::move(rec));
  }

  void Finish()
  {
    if (!block_.empty())
    {
      CloseBlock();
    }
    if (!day_blocks_.empty())
    {
      CloseDay();
    }
  }

private:
  void CloseBlock()
  {
    day_blocks_.push_back(SettleBlock(block_));
    block_.clear();
  }

  void CloseDay()
  {
    sink_(SummarizeDay(day_, day_blocks_));
    day_blocks_.clear();
  }

  std::function<void(DailyAggregate)> sink_;
  std::vector<TxRecord>               block_;
  std::vector<BlockTotals>            day_blocks_;
  std::string                         day_;
};

inline std::vector<DailyAggregate> ReplayDays(std::span<TxRecord const> records)
{
  std::vector<DailyAggregate> out;
  DailyReplay replay{[&](DailyAggregate agg) { out.push_back(std::move(agg)); }};
  for (auto const &rec : records)
  {
    replay.Add(rec);
  }
  replay.Finish();
  return out;
}

/// Per-day actual, counterfactual and savings sums. Days without blocks do
/// not appear.
inline std::vector<DailyAggregate> DailySavings(std::span<TxRecord const> records)
{
  return ReplayDays(records);
}

/// Per-day population variance of block fee totals under both pricing rules.
inline std::vector<DailyAggregate> DailyVariance(std::span<TxRecord const> records)
{
  return ReplayDays(records);
}

/// The further variance reduction a B-block payout window gives to a single
/// block's revenue share: var / B^2. Reported beside the raw figures only.
inline double BAveragingNote(double variance, std::size_t window)
{
  if (window == 0)
  {
    throw Error(ErrorCode::kDomain, "B must be at least 1");
  }
  auto const b = static_cast<double>(window);
  return variance / (b * b);
}

/// `day,usd_per_coin` rows.
inline std::map<std::string, double> LoadPrices(std::istream &in,
                                                std::string const &source = "<prices>")
{
  std::map<std::string, double> prices;
  std::string                   line;
  std::size_t                   line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    auto const view = detail::Trim(line);
    if (view.empty() || view.front() == '#' || view.starts_with("day"))
    {
      continue;
    }
    auto const fields = detail::SplitCsv(view);
    if (fields.size() != 2 || !detail::IsCalendarDate(fields[0]))
    {
      detail::ParseFailure(source, line_no, "expected day,usd_per_coin");
    }
    double     price{};
    auto const [ptr, ec] =
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), price);
    if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size() || !(price >= 0.0))
    {
      detail::ParseFailure(source, line_no, "bad price '" + std::string{fields[1]} + "'");
    }
    prices[std::string{fields[0]}] = price;
  }
  return prices;
}

inline std::map<std::string, double> LoadPricesFile(std::string const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(ErrorCode::kIo, "cannot open " + path);
  }
  return LoadPrices(in, path);
}

struct UsdConversion
{
  std::map<std::string, double> usd_per_coin;
  double                        units_per_coin{1e8};
};

inline void WriteDailyCsvHeader(std::ostream &out, bool with_usd)
{
  out << "day,actual,counterfactual,savings,var_first,var_second,ratio";
  if (with_usd)
  {
    out << ",actual_usd,counterfactual_usd,savings_usd";
  }
  out << '\n';
}

inline void WriteDailyCsvRow(std::ostream &out, DailyAggregate const &agg,
                             UsdConversion const *usd = nullptr)
{
  out << agg.day << ',' << agg.actual_fees.units() << ',' << agg.counterfactual_fees.units()
      << ',' << agg.savings.units() << ',' << FormatFixed(agg.var_first, 2) << ','
      << FormatFixed(agg.var_second, 2) << ',' << FormatFixed(agg.variance_ratio, 6);
  if (usd != nullptr)
  {
    auto const it = usd->usd_per_coin.find(agg.day);
    double const price =
        it == usd->usd_per_coin.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    auto const to_usd = [&](FeeAmount a) {
      return static_cast<double>(a.units()) / usd->units_per_coin * price;
    };
    out << ',' << FormatFixed(to_usd(agg.actual_fees), 2) << ','
        << FormatFixed(to_usd(agg.counterfactual_fees), 2) << ','
        << FormatFixed(to_usd(agg.savings), 2);
  }
  out << '\n';
}

}  // namespace feemarket
