#include "zebris/harness.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <optional>
#include <thread>

#include "zebris/config_io.hpp"
#include "zebris/errors.hpp"

namespace zebris {

namespace {

constexpr std::uint64_t kMarketStream = 1;
constexpr std::uint64_t kRuntimeStream = 2;

struct Cell {
  MechanismSpec mechanism;
  int pool = 0;
  int episode = 0;
};

struct CellOutput {
  EpisodeSeries series;
  std::string audit_rows;
  std::string posture_rows;
};

class OutputFile {
 public:
  explicit OutputFile(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open for writing: " + path.string());
  }
  void write(const std::string& text) {
    out_ << text;
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

CellOutput run_cell(const Cell& cell, const RunPlan& plan, bool want_audit, bool want_postures) {
  ScenarioConfig scenario = plan.scenario;
  scenario.buyer_pool_size = cell.pool;
  const auto seed = cell_seed(plan.base_seed, cell.pool, cell.episode);
  EpisodeOptions opts;
  opts.keep_trades = want_audit;
  auto ep = run_episode(cell.mechanism, scenario, seed, opts);

  CellOutput out;
  out.series = EpisodeSeries{cell.mechanism.name, cell.pool, cell.episode, std::move(ep.rounds)};
  if (want_audit) {
    for (const auto& t : ep.trades) {
      out.audit_rows += trades_audit_row(
          audit_trade(t, cell.mechanism, scenario.mechanism, cell.pool, cell.episode), &t);
    }
  }
  if (want_postures) {
    const auto prefix = cell.mechanism.name + ',' + std::to_string(cell.pool) + ',' +
                        std::to_string(cell.episode) + ',';
    const auto num_sellers = static_cast<int>(ep.ledger.postures().size());
    for (int round = 0; round < scenario.horizon; ++round) {
      for (int j = 0; j < num_sellers; ++j) {
        const auto& h = ep.ledger.history(j).at(static_cast<std::size_t>(round));
        out.posture_rows += prefix + std::to_string(round) + ',' + std::to_string(j) + ',' +
                            format_number(h.posture) + ',' + format_number(h.average_refund) + '\n';
      }
    }
  }
  return out;
}

}  // namespace

EpisodeResult run_episode(const MechanismSpec& mechanism, const ScenarioConfig& scenario,
                          std::uint64_t seed, const EpisodeOptions& options) {
  scenario.validate();
  Rng market(derive_seed(seed, kMarketStream));
  const std::uint64_t runtime_seed = derive_seed(seed, kRuntimeStream);

  const auto profiles = sample_seller_profiles(scenario, market);
  std::vector<double> initial;
  for (const auto& p : profiles) initial.push_back(p.initial_posture);

  EpisodeResult result;
  result.mechanism = mechanism.name;
  result.seed = seed;
  result.ledger = PostureLedger(std::move(initial));
  result.rounds.reserve(static_cast<std::size_t>(scenario.horizon));

  for (int t = 0; t < scenario.horizon; ++t) {
    const auto postures = result.ledger.postures();
    const std::vector<double> current(postures.begin(), postures.end());
    const auto in = sample_round(scenario, market, t, profiles, current);
    auto round = run_round(mechanism, in, scenario, result.ledger, runtime_seed);
    result.rounds.push_back(compute_round_metrics(round.outcome, round.trades, round.active_buyers));
    if (options.on_round) options.on_round(in, round);
    if (options.keep_trades) {
      for (auto& trade : round.trades) result.trades.push_back(std::move(trade));
    }
  }
  return result;
}

void RunPlan::validate() const {
  scenario.validate();
  if (mechanisms.empty()) throw ConfigError("plan lists no mechanisms");
  for (const auto& name : mechanisms) mechanism_by_name(name);
  if (buyer_pool_sizes.empty()) throw ConfigError("plan lists no buyer pool sizes");
  for (int n : buyer_pool_sizes) {
    if (n < 0) throw ConfigError("buyer pool sizes must be >= 0");
    if (!scenario.activation_profile.empty() &&
        n > static_cast<int>(scenario.activation_profile.size())) {
      throw ConfigError("activation profile is shorter than buyer pool size " +
                        std::to_string(n));
    }
  }
  if (episodes_per_cell < 1) throw ConfigError("episodes_per_cell must be >= 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

std::uint64_t cell_seed(std::uint64_t base_seed, int buyer_pool_size, int episode) {
  return base_seed ^ stable_hash("pool=" + std::to_string(buyer_pool_size) +
                                 "/episode=" + std::to_string(episode));
}

PlanResult run_plan(const RunPlan& plan, bool write_files) {
  plan.validate();

  std::vector<Cell> cells;
  for (const auto& name : plan.mechanisms) {
    const auto mech = mechanism_by_name(name);
    for (int pool : plan.buyer_pool_sizes) {
      for (int e = 0; e < plan.episodes_per_cell; ++e) cells.push_back({mech, pool, e});
    }
  }

  const bool want_audit = write_files && plan.write_trades_audit;
  const bool want_postures = write_files && plan.write_postures;

  std::optional<OutputFile> audit, postures;
  PlanResult result;
  if (write_files) {
    std::error_code ec;
    std::filesystem::create_directories(plan.output_dir, ec);
    if (ec) {
      throw IoError("cannot create output directory " + plan.output_dir.string() + ": " +
                    ec.message());
    }
    auto resolved = plan_to_json(plan);
    const auto config_path = plan.output_dir / "resolved_config.json";
    write_text_file(config_path, resolved.dump(2) + "\n");
    result.files.push_back(config_path);
    if (want_audit) {
      audit.emplace(plan.output_dir / "trades_audit.csv");
      audit->write(trades_audit_header());
      result.files.push_back(plan.output_dir / "trades_audit.csv");
    }
    if (want_postures) {
      postures.emplace(plan.output_dir / "postures.csv");
      postures->write("mechanism,buyer_pool_size,episode,round,seller_id,posture,average_refund\n");
      result.files.push_back(plan.output_dir / "postures.csv");
    }
  }

  const std::size_t workers =
      plan.threads > 0 ? static_cast<std::size_t>(plan.threads)
                       : std::max<std::size_t>(1, std::thread::hardware_concurrency());

  // Episodes run in batches of `workers`; outputs are merged in cell order
  // by this thread only.
  std::vector<EpisodeSeries> series;
  series.reserve(cells.size());
  for (std::size_t start = 0; start < cells.size(); start += workers) {
    const std::size_t stop = std::min(cells.size(), start + workers);
    std::vector<std::future<CellOutput>> batch;
    for (std::size_t k = start; k < stop; ++k) {
      const auto policy = workers > 1 ? std::launch::async : std::launch::deferred;
      batch.push_back(std::async(policy, run_cell, std::cref(cells[k]), std::cref(plan),
                                 want_audit, want_postures));
    }
    for (auto& f : batch) {
      auto out = f.get();
      if (audit) audit->write(out.audit_rows);
      if (postures) postures->write(out.posture_rows);
      series.push_back(std::move(out.series));
    }
  }

  result.summary = aggregate_episodes(series);
  result.episodes = cells.size();
  if (write_files) {
    const auto csv_path = plan.output_dir / "summary.csv";
    const auto json_path = plan.output_dir / "summary.json";
    write_text_file(csv_path, summary_csv(result.summary));
    write_text_file(json_path, summary_json(result.summary).dump(2) + "\n");
    result.files.push_back(csv_path);
    result.files.push_back(json_path);
  }
  return result;
}

}  // namespace zebris
