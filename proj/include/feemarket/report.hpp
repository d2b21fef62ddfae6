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

#include "feemarket/chain.hpp"
#include "feemarket/distributions.hpp"
#include "feemarket/format.hpp"
#include "feemarket/manipulation.hpp"
#include "feemarket/svg.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace feemarket {

inline constexpr char const *kVersion = "0.1.0";

/// Ordered key=value pairs describing a run. Thread counts are deliberately
/// not part of it: output must not depend on them.
using RunSettings = std::vector<std::pair<std::string, std::string>>;

/// Header line for commands that draw no random numbers.
inline std::string ConfigLine(std::string const &command, RunSettings const &settings)
{
  std::string line = "# feemarket " + std::string{kVersion} + " " + command;
  for (auto const &[key, value] : settings)
  {
    line += " " + key + "=" + value;
  }
  return line + "\n";
}

inline std::string ConfigLine(std::string const &command, std::uint64_t seed,
                              RunSettings settings)
{
  settings.insert(settings.begin(), {"seed", std::to_string(seed)});
  return ConfigLine(command, settings);
}

inline nlohmann::ordered_json ConfigJson(std::string const &command, std::uint64_t seed,
                                         RunSettings const &settings)
{
  nlohmann::ordered_json cfg;
  cfg["version"] = kVersion;
  cfg["command"] = command;
  cfg["seed"]    = seed;
  for (auto const &[key, value] : settings)
  {
    cfg["config"][key] = value;
  }
  return cfg;
}

inline std::string GainSweepCsv(GainSweep const &sweep, std::uint64_t seed,
                                std::string const &config_line)
{
  std::ostringstream out;
  out << config_line << "M,B,mean_gain,std_error,trials,seed\n";
  for (auto const &cell : sweep.cells)
  {
    out << cell.miners << ',' << cell.window << ',' << FormatFixed(cell.gain.mean, 9) << ','
        << FormatFixed(cell.gain.std_error, 9) << ',' << sweep.trials << ',' << seed << '\n';
  }
  return out.str();
}

/// Gain against M, one line per B.
inline LinePlot GainByMinersPlot(GainSweep const &sweep)
{
  LinePlot plot{"Manipulation gain vs number of miners", "miners (M)", "mean gain", true, {}};
  std::map<std::size_t, PlotSeries> by_window;
  for (auto const &cell : sweep.cells)
  {
    auto &s = by_window[cell.window];
    s.name  = "B=" + std::to_string(cell.window);
    s.points.emplace_back(static_cast<double>(cell.miners), cell.gain.mean);
  }
  for (auto &[b, s] : by_window)
  {
    plot.series.push_back(std::move(s));
  }
  return plot;
}

/// Gain against B, one line per M.
inline LinePlot GainByWindowPlot(GainSweep const &sweep)
{
  LinePlot plot{"Manipulation gain vs reward window", "blocks averaged (B)", "mean gain", true,
                {}};
  std::map<std::size_t, PlotSeries> by_miners;
  for (auto const &cell : sweep.cells)
  {
    auto &s = by_miners[cell.miners];
    s.name  = "M=" + std::to_string(cell.miners);
    s.points.emplace_back(static_cast<double>(cell.window), cell.gain.mean);
  }
  for (auto &[m, s] : by_miners)
  {
    plot.series.push_back(std::move(s));
  }
  return plot;
}

struct StrategicGainRow
{
  std::size_t  users{0};
  std::size_t  k{0};
  std::size_t  trials{0};
  MeanEstimate gap;
  // closed forms; NaN where they do not apply to the distribution
  double uniform_spacing{std::numeric_limits<double>::quiet_NaN()};
  double uniform_inverse_a{std::numeric_limits<double>::quiet_NaN()};
  double exp_spacings{std::numeric_limits<double>::quiet_NaN()};
  double exp_alternative{std::numeric_limits<double>::quiet_NaN()};
  std::string matches;
};

/// MC estimate of E[V(K-1) - V(K)] for one A plus the applicable closed forms.
inline StrategicGainRow StrategicGainAt(ValueDistribution const &dist, std::size_t users,
                                        std::size_t k, std::size_t trials, SeededRng rng,
                                        unsigned threads)
{
  StrategicGainRow row;
  row.users  = users;
  row.k      = k;
  row.trials = trials;
  row.gap    = OrderStatGapMc(dist, users, k, trials, rng, threads);
  auto within = [&](double target) {
    return std::abs(row.gap.mean - target) <= 3.0 * row.gap.std_error;
  };
  std::vector<std::string> hits;
  if (dist.kind() == ValueDistribution::Kind::kUniform && !dist.IsTruncated())
  {
    row.uniform_spacing   = UniformGapExact(dist.lo(), dist.hi(), users);
    row.uniform_inverse_a = (dist.hi() - dist.lo()) / static_cast<double>(users);
    if (within(row.uniform_spacing))
    {
      hits.emplace_back("spacing");
    }
    if (within(row.uniform_inverse_a))
    {
      hits.emplace_back("inverse_a");
    }
  }
  if (dist.kind() == ValueDistribution::Kind::kExponential && !dist.IsTruncated())
  {
    auto const cmp      = CompareExponentialGap(row.gap, dist.rate(), users, k);
    row.exp_spacings    = cmp.spacings;
    row.exp_alternative = cmp.alternative;
    if (cmp.matches_spacings)
    {
      hits.emplace_back("spacings");
    }
    if (cmp.matches_alternative)
    {
      hits.emplace_back("alternative");
    }
  }
  for (auto const &h : hits)
  {
    row.matches += (row.matches.empty() ? "" : "+") + h;
  }
  if (row.matches.empty())
  {
    row.matches = "none";
  }
  return row;
}

inline std::string StrategicGainCsv(std::vector<StrategicGainRow> const &rows,
                                    std::string const &config_line)
{
  std::ostringstream out;
  out << config_line
      << "A,K,mean_gap,std_error,trials,uniform_1_over_a_plus_1,uniform_1_over_a,"
         "exp_1_over_lambda_k_minus_1,exp_1_over_lambda_a_minus_k_plus_1,matches\n";
  for (auto const &r : rows)
  {
    out << r.users << ',' << r.k << ',' << FormatFixed(r.gap.mean, 9) << ','
        << FormatFixed(r.gap.std_error, 9) << ',' << r.trials << ','
        << FormatFixed(r.uniform_spacing, 9) << ',' << FormatFixed(r.uniform_inverse_a, 9) << ','
        << FormatFixed(r.exp_spacings, 9) << ',' << FormatFixed(r.exp_alternative, 9) << ','
        << r.matches << '\n';
  }
  return out.str();
}

inline std::string ChainRecordsCsv(std::vector<BlockRecord> const &records,
                                   std::string const &config_line)
{
  std::ostringstream out;
  out << config_line << "height,revenue,reward,fill_status,surplus,max_surplus\n";
  for (auto const &r : records)
  {
    out << r.height << ',' << r.revenue.units() << ',' << FormatFixed(r.miner_reward, 6) << ','
        << ToString(r.outcome.fill_status) << ',' << FormatFixed(r.realized_surplus, 9) << ','
        << FormatFixed(r.max_surplus, 9) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json ChainSummaryJson(ChainSummary const &s, std::size_t window)
{
  nlohmann::ordered_json j;
  j["window"]               = window;
  j["blocks"]               = s.blocks;
  j["total_revenue"]        = s.total_revenue.units();
  j["total_user_payments"]  = s.total_user_payments.units();
  j["total_fill_penalties"] = s.total_fill_penalties.units();
  j["total_fake_fees"]      = s.total_fake_fees.units();
  j["total_reward_paid"]    = FormatFixed(s.total_reward_paid, 6);
  j["accrued_unpaid"]       = FormatFixed(s.accrued_unpaid, 6);
  j["reward_mean"]          = FormatFixed(s.reward_mean, 6);
  j["reward_variance"]      = FormatFixed(s.reward_variance, 6);
  j["revenue_variance"]     = FormatFixed(s.revenue_variance, 6);
  j["efficiency_ratio"]     = FormatFixed(s.efficiency_ratio, 6);
  j["revenue_ratio"]        = FormatFixed(s.revenue_ratio, 6);
  j["conservation_check"]   = s.conservation_ok ? "pass" : "fail";
  auto &miners              = j["reward_by_miner"];
  miners                    = nlohmann::ordered_json::array();
  for (double r : s.reward_by_miner)
  {
    miners.push_back(FormatFixed(r, 6));
  }
  return j;
}

}  // namespace feemarket
