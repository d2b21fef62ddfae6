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

// Command-line driver: Monte-Carlo sweeps, chain runs and historical replay.

#include "feemarket/feemarket.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fm = feemarket;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk       = 0;
constexpr int kExitUsage    = 2;
constexpr int kExitData     = 3;
constexpr int kExitInternal = 4;

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

template <typename T>
std::string Join(std::vector<T> const &xs)
{
  std::string out;
  for (auto const &x : xs)
  {
    if (!out.empty())
    {
      out += ',';
    }
    if constexpr (std::is_floating_point_v<T>)
    {
      out += fm::FormatShort(x);
    }
    else
    {
      out += std::to_string(x);
    }
  }
  return out;
}

struct Common
{
  std::string   out_dir;
  unsigned      threads{0};
  std::uint64_t seed{1};
};

void WriteText(fs::path const &path, std::string const &text)
{
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out{path, std::ios::binary};
  out << text;
  if (!out)
  {
    throw fm::Error(fm::ErrorCode::kIo, "cannot write " + path.string());
  }
  std::cout << "wrote " << path.string() << '\n';
}

/// Value-distribution flags shared by several subcommands.
struct DistFlags
{
  std::string name{"uniform"};
  double      lo{0.0};
  double      hi{1.0};
  double      rate{1.0};
  double      median{2.0};
  double      mean{10.0};

  void Register(CLI::App &cmd)
  {
    cmd.add_option("--dist", name, "uniform | exponential | power-law")
        ->check(CLI::IsMember({"uniform", "exponential", "power-law"}))
        ->capture_default_str();
    cmd.add_option("--lo", lo, "uniform lower bound")->capture_default_str();
    cmd.add_option("--hi", hi, "uniform upper bound")->capture_default_str();
    cmd.add_option("--rate", rate, "exponential rate")->capture_default_str();
    cmd.add_option("--median", median, "power-law median")->capture_default_str();
    cmd.add_option("--mean", mean, "power-law mean")->capture_default_str();
  }

  fm::ValueDistribution Build() const
  {
    if (name == "exponential")
    {
      return fm::ValueDistribution::Exponential(rate);
    }
    if (name == "power-law")
    {
      return fm::FitPowerLaw(median, mean);
    }
    return fm::ValueDistribution::Uniform(lo, hi);
  }

  void Describe(fm::RunSettings &settings) const
  {
    settings.emplace_back("dist", name);
    if (name == "exponential")
    {
      settings.emplace_back("rate", fm::FormatShort(rate));
    }
    else if (name == "power-law")
    {
      settings.emplace_back("median", fm::FormatShort(median));
      settings.emplace_back("mean", fm::FormatShort(mean));
    }
    else
    {
      settings.emplace_back("lo", fm::FormatShort(lo));
      settings.emplace_back("hi", fm::FormatShort(hi));
    }
  }
};

// gain-sweep ---------------------------------------------------------------

struct GainSweepFlags
{
  std::size_t              k{200};
  std::size_t              mempool{400};
  std::size_t              trials{1000};
  std::vector<std::size_t> miners{1, 10, 100, 1000};
  std::vector<std::size_t> windows{1, 10, 50, 100};
  double                   median{2.0};
  double                   mean{10.0};
  std::string              model{"full"};
};

fm::RevenueModel ParseModel(std::string const &name)
{
  if (name == "literal")
  {
    return fm::RevenueModel::kLiteral;
  }
  if (name == "user")
  {
    return fm::RevenueModel::kUserRevenue;
  }
  return fm::RevenueModel::kFullRevenue;
}

int RunGainSweepCommand(Common const &common, GainSweepFlags const &f)
{
  if (f.mempool < f.k)
  {
    throw UsageError("--mempool must be at least --k");
  }
  auto const dist  = fm::FitPowerLaw(f.median, f.mean);
  auto const model = ParseModel(f.model);
  auto const sweep = fm::RunGainSweep(dist, f.mempool, f.k, f.miners, f.windows, f.trials,
                                      {common.seed, 0}, model, common.threads);

  fm::RunSettings const settings{{"k", std::to_string(f.k)},
                                 {"mempool", std::to_string(f.mempool)},
                                 {"trials", std::to_string(f.trials)},
                                 {"miners", Join(f.miners)},
                                 {"window", Join(f.windows)},
                                 {"median", fm::FormatShort(f.median)},
                                 {"mean", fm::FormatShort(f.mean)},
                                 {"model", std::string{fm::ToString(model)}}};
  auto const header = fm::ConfigLine("gain-sweep", common.seed, settings);
  fs::path const dir{common.out_dir};
  WriteText(dir / "gain_sweep.csv", fm::GainSweepCsv(sweep, common.seed, header));
  WriteText(dir / "gain_vs_miners.svg", fm::GainByMinersPlot(sweep).Render());
  WriteText(dir / "gain_vs_window.svg", fm::GainByWindowPlot(sweep).Render());
  std::cout << "fitted power law: " << dist.Describe() << '\n';
  return kExitOk;
}

// strategic-gain -----------------------------------------------------------

struct StrategicGainFlags
{
  DistFlags                dist;
  std::vector<std::size_t> users{50, 100, 200, 400};
  std::size_t              k{10};
  std::size_t              trials{100000};
};

int RunStrategicGainCommand(Common const &common, StrategicGainFlags const &f)
{
  if (f.users.empty())
  {
    throw UsageError("--users needs at least one value");
  }
  for (auto a : f.users)
  {
    if (a <= f.k)
    {
      throw UsageError("every --users value must exceed --k (got A=" + std::to_string(a) + ")");
    }
  }
  if (f.k < 2)
  {
    throw UsageError("--k must be at least 2");
  }
  auto const dist = f.dist.Build();

  std::vector<fm::StrategicGainRow> rows;
  fm::PlotSeries                    mc{"Monte Carlo", {}};
  fm::PlotSeries                    closed{"closed form", {}};
  for (std::size_t i = 0; i < f.users.size(); ++i)
  {
    auto row = fm::StrategicGainAt(dist, f.users[i], f.k, f.trials, {common.seed, i},
                                   common.threads);
    auto const x = static_cast<double>(row.users);
    mc.points.emplace_back(x, row.gap.mean);
    double const exact = !std::isnan(row.uniform_spacing) ? row.uniform_spacing : row.exp_spacings;
    closed.points.emplace_back(x, exact);
    rows.push_back(std::move(row));
  }

  fm::RunSettings settings;
  f.dist.Describe(settings);
  settings.emplace_back("users", Join(f.users));
  settings.emplace_back("k", std::to_string(f.k));
  settings.emplace_back("trials", std::to_string(f.trials));
  auto const header = fm::ConfigLine("strategic-gain", common.seed, settings);

  fm::LinePlot plot{"Expected strategic gain vs users", "users (A)", "E[V(K-1) - V(K)]", true,
                    {mc}};
  if (std::any_of(closed.points.begin(), closed.points.end(),
                  [](auto const &p) { return !std::isnan(p.second); }))
  {
    plot.series.push_back(closed);
  }
  fs::path const dir{common.out_dir};
  WriteText(dir / "strategic_gain.csv", fm::StrategicGainCsv(rows, header));
  WriteText(dir / "strategic_gain.svg", plot.Render());
  for (auto const &r : rows)
  {
    std::cout << "A=" << r.users << " mean_gap " << fm::FormatFixed(r.gap.mean, 9) << " se "
              << fm::FormatFixed(r.gap.std_error, 9) << " matches " << r.matches << '\n';
  }
  return kExitOk;
}

// chain --------------------------------------------------------------------

struct ChainFlags
{
  DistFlags                dist;
  std::size_t              users{400};
  double                   arrival{0.25};
  std::uint32_t            k{25};
  std::uint32_t            capacity{0};
  std::int64_t             min_fee{0};
  double                   units_per_value{1e8};
  std::size_t              blocks{2000};
  std::vector<std::size_t> windows{1, 10, 50};
  std::size_t              miners{10};
  std::string              policy{"honest"};
  std::string              pricing{"proposed"};
  std::string              model{"full"};
  std::string              strategy{"truthful"};
  double                   shade{1.0};
};

fm::BidStrategy ParseStrategy(ChainFlags const &f)
{
  if (f.strategy == "shade")
  {
    return fm::BidStrategy::FixedShade(f.shade);
  }
  return fm::BidStrategy::Truthful();
}

fm::PricingRule ParsePricing(std::string const &name)
{
  if (name == "gfp")
  {
    return fm::PricingRule::kGfp;
  }
  if (name == "gsp")
  {
    return fm::PricingRule::kGspKPlus1;
  }
  return fm::PricingRule::kProposed;
}

int RunChainCommand(Common const &common, ChainFlags const &f)
{
  if (f.windows.empty())
  {
    throw UsageError("--window needs at least one value");
  }
  fm::ChainConfig cfg;
  cfg.population.users           = f.users;
  cfg.population.arrival_prob    = f.arrival;
  cfg.population.value_dist      = f.dist.Build();
  cfg.population.strategy        = ParseStrategy(f);
  cfg.population.units_per_value = f.units_per_value;
  cfg.params.k_priced_slots      = f.k;
  cfg.params.capacity            = f.capacity == 0 ? f.k : f.capacity;
  cfg.params.min_fee             = fm::FeeAmount{f.min_fee};
  cfg.params.pricing             = ParsePricing(f.pricing);
  cfg.policy      = f.policy == "manipulator" ? fm::MinerPolicy::kOptimalManipulator
                                              : fm::MinerPolicy::kHonest;
  cfg.miner_setup = {f.miners, ParseModel(f.model)};
  cfg.blocks      = f.blocks;
  cfg.seed        = common.seed;

  fm::RunSettings settings;
  f.dist.Describe(settings);
  settings.emplace_back("users", std::to_string(f.users));
  settings.emplace_back("arrival", fm::FormatShort(f.arrival));
  settings.emplace_back("k", std::to_string(f.k));
  settings.emplace_back("capacity", std::to_string(cfg.params.capacity));
  settings.emplace_back("min_fee", std::to_string(f.min_fee));
  settings.emplace_back("units_per_value", fm::FormatShort(f.units_per_value));
  settings.emplace_back("blocks", std::to_string(f.blocks));
  settings.emplace_back("window", Join(f.windows));
  settings.emplace_back("miners", std::to_string(f.miners));
  settings.emplace_back("policy", f.policy);
  settings.emplace_back("pricing", f.pricing);
  settings.emplace_back("model", f.model);
  settings.emplace_back("strategy", f.strategy == "shade" ? "shade:" + fm::FormatShort(f.shade)
                                                          : f.strategy);
  auto const     header = fm::ConfigLine("chain", common.seed, settings);
  fs::path const dir{common.out_dir};

  // windows are independent runs on the same seed, hence the same demand
  auto const runs = fm::ParallelMap(f.windows.size(), common.threads, [&](std::size_t i) {
    fm::ChainConfig c          = cfg;
    c.params.reward_window     = static_cast<std::uint32_t>(f.windows[i]);
    return fm::RunChain(c);
  });

  auto summary          = fm::ConfigJson("chain", common.seed, settings);
  summary["runs"]       = nlohmann::ordered_json::array();
  auto &comparison      = summary["variance_comparison"];
  comparison            = nlohmann::ordered_json::array();
  double const base_var = runs.front().summary.revenue_variance;
  fm::LinePlot plot{"Miner reward per block", "block height", "reward (base units)", false, {}};
  for (std::size_t i = 0; i < runs.size(); ++i)
  {
    auto const  window = f.windows[i];
    auto const &run    = runs[i];
    WriteText(dir / ("chain_B" + std::to_string(window) + ".csv"),
              fm::ChainRecordsCsv(run.records, header));
    summary["runs"].push_back(fm::ChainSummaryJson(run.summary, window));

    nlohmann::ordered_json row;
    row["window"]                 = window;
    row["reward_variance"]        = fm::FormatFixed(run.summary.reward_variance, 6);
    row["revenue_variance"]       = fm::FormatFixed(run.summary.revenue_variance, 6);
    row["iid_window_mean"]        = fm::FormatFixed(base_var / static_cast<double>(window), 6);
    row["single_block_share"]     = fm::FormatFixed(fm::BAveragingNote(base_var, window), 6);
    comparison.push_back(row);

    fm::PlotSeries series{"B=" + std::to_string(window), {}};
    for (auto const &r : run.records)
    {
      series.points.emplace_back(static_cast<double>(r.height), r.miner_reward);
    }
    plot.series.push_back(std::move(series));

    std::cout << "B=" << window << " efficiency_ratio "
              << fm::FormatFixed(run.summary.efficiency_ratio, 6) << " revenue_ratio "
              << fm::FormatFixed(run.summary.revenue_ratio, 6) << " reward_variance "
              << fm::FormatFixed(run.summary.reward_variance, 6) << " conservation "
              << (run.summary.conservation_ok ? "pass" : "fail") << '\n';
  }
  WriteText(dir / "chain_summary.json", summary.dump(2) + "\n");
  WriteText(dir / "chain_rewards.svg", plot.Render());
  return kExitOk;
}

// replay -------------------------------------------------------------------

struct ReplayFlags
{
  std::string input;
  std::string prices;
  double      units_per_coin{1e8};
};

int RunReplayCommand(Common const &common, ReplayFlags const &f)
{
  std::ifstream in{f.input};
  if (!in)
  {
    throw fm::Error(fm::ErrorCode::kIo, "cannot open " + f.input);
  }
  std::optional<fm::UsdConversion> usd;
  if (!f.prices.empty())
  {
    usd = fm::UsdConversion{fm::LoadPricesFile(f.prices), f.units_per_coin};
  }

  fm::RunSettings settings{{"input", fs::path{f.input}.filename().string()}};
  if (usd)
  {
    settings.emplace_back("prices", fs::path{f.prices}.filename().string());
    settings.emplace_back("units_per_coin", fm::FormatShort(f.units_per_coin));
  }

  std::ostringstream csv;
  csv << fm::ConfigLine("replay", settings);
  fm::WriteDailyCsvHeader(csv, usd.has_value());
  std::vector<fm::DailyAggregate> days;
  fm::DailyReplay replay{[&](fm::DailyAggregate agg) {
    fm::WriteDailyCsvRow(csv, agg, usd ? &*usd : nullptr);
    days.push_back(std::move(agg));
  }};
  fm::TxCsvReader reader{in, f.input};
  while (auto rec = reader.Next())
  {
    replay.Add(std::move(*rec));
  }
  replay.Finish();

  fm::PlotSeries savings{"savings", {}};
  fm::PlotSeries first{"first price", {}};
  fm::PlotSeries second{"minimum rate", {}};
  for (std::size_t i = 0; i < days.size(); ++i)
  {
    auto const x = static_cast<double>(i + 1);
    savings.points.emplace_back(x, static_cast<double>(days[i].savings.units()));
    first.points.emplace_back(x, days[i].var_first);
    second.points.emplace_back(x, days[i].var_second);
  }
  fs::path const dir{common.out_dir};
  WriteText(dir / "replay_daily.csv", csv.str());
  WriteText(dir / "replay_savings.svg",
            fm::LinePlot{"User savings per day", "day index", "savings (base units)", false,
                         {savings}}
                .Render());
  WriteText(dir / "replay_variance.svg",
            fm::LinePlot{"Block fee variance per day", "day index", "variance (base units^2)",
                         false, {first, second}}
                .Render());
  std::cout << "days " << days.size() << '\n';
  return kExitOk;
}

int ExitCodeFor(fm::ErrorCode code)
{
  switch (code)
  {
  case fm::ErrorCode::kParameter:
  case fm::ErrorCode::kDomain:
  case fm::ErrorCode::kFit:
    return kExitUsage;
  case fm::ErrorCode::kParse:
  case fm::ErrorCode::kIo:
  case fm::ErrorCode::kOverflow:
  case fm::ErrorCode::kBidBelowMinimum:
    return kExitData;
  case fm::ErrorCode::kInsufficientBids:
    break;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Fee-market mechanism simulator and replay tool"};
  app.require_subcommand(1);

  Common common;
  if (char const *env = std::getenv("FEEMARKET_OUT_DIR"); env != nullptr && *env != '\0')
  {
    common.out_dir = env;
  }
  else
  {
    common.out_dir = ".";
  }
  auto add_common = [&](CLI::App *cmd, bool seeded) {
    cmd->add_option("--out", common.out_dir, "output directory (default $FEEMARKET_OUT_DIR or .)");
    cmd->add_option("--threads", common.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    if (seeded)
    {
      cmd->add_option("--seed", common.seed, "master seed")->capture_default_str();
    }
  };

  GainSweepFlags gs;
  auto          *gain = app.add_subcommand("gain-sweep", "manipulation gain over miners and window");
  add_common(gain, true);
  gain->add_option("--k", gs.k, "priced slots")->check(CLI::PositiveNumber)->capture_default_str();
  gain->add_option("--mempool", gs.mempool, "bids per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gain->add_option("--trials", gs.trials)->check(CLI::PositiveNumber)->capture_default_str();
  gain->add_option("--miners", gs.miners, "comma list")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gain->add_option("--window", gs.windows, "comma list of B")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gain->add_option("--median", gs.median, "power-law median")->capture_default_str();
  gain->add_option("--mean", gs.mean, "power-law mean")->capture_default_str();
  gain->add_option("--model", gs.model, "literal | user | full")
      ->check(CLI::IsMember({"literal", "user", "full"}))
      ->capture_default_str();

  StrategicGainFlags sg;
  auto *strategic = app.add_subcommand("strategic-gain", "E[V(K-1) - V(K)] against A");
  add_common(strategic, true);
  sg.dist.Register(*strategic);
  strategic->add_option("--users", sg.users, "comma list of A")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  strategic->add_option("--k", sg.k)->check(CLI::PositiveNumber)->capture_default_str();
  strategic->add_option("--trials", sg.trials)->check(CLI::PositiveNumber)->capture_default_str();

  ChainFlags ch;
  auto      *chain = app.add_subcommand("chain", "block-by-block chain simulation");
  add_common(chain, true);
  ch.dist.Register(*chain);
  chain->add_option("--users", ch.users)->check(CLI::PositiveNumber)->capture_default_str();
  chain->add_option("--arrival", ch.arrival, "per-block arrival probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  chain->add_option("--k", ch.k)->check(CLI::PositiveNumber)->capture_default_str();
  chain->add_option("--capacity", ch.capacity, "total slots, 0 = K")->capture_default_str();
  chain->add_option("--min-fee", ch.min_fee, "base units")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  chain->add_option("--units-per-value", ch.units_per_value)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  chain->add_option("--blocks", ch.blocks)->check(CLI::PositiveNumber)->capture_default_str();
  chain->add_option("--window", ch.windows, "comma list of B")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  chain->add_option("--miners", ch.miners)->check(CLI::PositiveNumber)->capture_default_str();
  chain->add_option("--policy", ch.policy, "honest | manipulator")
      ->check(CLI::IsMember({"honest", "manipulator"}))
      ->capture_default_str();
  chain->add_option("--pricing", ch.pricing, "proposed | gfp | gsp")
      ->check(CLI::IsMember({"proposed", "gfp", "gsp"}))
      ->capture_default_str();
  chain->add_option("--model", ch.model, "manipulator revenue model: literal | user | full")
      ->check(CLI::IsMember({"literal", "user", "full"}))
      ->capture_default_str();
  chain->add_option("--strategy", ch.strategy, "truthful | shade")
      ->check(CLI::IsMember({"truthful", "shade"}))
      ->capture_default_str();
  chain->add_option("--shade", ch.shade, "bid factor for --strategy shade")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  ReplayFlags rp;
  auto       *replay = app.add_subcommand("replay", "counterfactual settlement of historical blocks");
  add_common(replay, false);
  replay->add_option("--input", rp.input, "height,day,tx_id,size_bytes,fee CSV")->required();
  replay->add_option("--prices", rp.prices, "day,usd_per_coin CSV");
  replay->add_option("--units-per-coin", rp.units_per_coin)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try
  {
    if (gain->parsed())
    {
      return RunGainSweepCommand(common, gs);
    }
    if (strategic->parsed())
    {
      return RunStrategicGainCommand(common, sg);
    }
    if (chain->parsed())
    {
      return RunChainCommand(common, ch);
    }
    return RunReplayCommand(common, rp);
  }
  catch (UsageError const &e)
  {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (fm::Error const &e)
  {
    std::cerr << e.what() << '\n';
    return ExitCodeFor(e.code());
  }
  catch (std::exception const &e)
  {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
