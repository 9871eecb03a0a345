#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "zebris/invariants.hpp"
#include "zebris/market_model.hpp"
#include "zebris/mechanisms.hpp"
#include "zebris/metrics.hpp"
#include "zebris/posture.hpp"

namespace zebris {

struct EpisodeOptions {
  bool keep_trades = true;
  /// Called after every round with that round's inputs and results.
  std::function<void(const RoundInputs&, const RoundResult&)> on_round;
};

struct EpisodeResult {
  std::string mechanism;
  std::uint64_t seed = 0;
  std::vector<RoundMetrics> rounds;
  std::vector<TradeRecord> trades;
  PostureLedger ledger{{}};
};

/// Runs `scenario.horizon` rounds. The market stream and the runtime
/// compliance stream are both derived from `seed` and neither depends on
/// the mechanism, so mechanisms run with the same seed see the same market.
EpisodeResult run_episode(const MechanismSpec& mechanism, const ScenarioConfig& scenario,
                          std::uint64_t seed, const EpisodeOptions& options = {});

struct RunPlan {
  ScenarioConfig scenario{};
  std::vector<std::string> mechanisms = mechanism_names();
  std::vector<int> buyer_pool_sizes{10, 15, 20, 25, 30};
  int episodes_per_cell = 50;
  std::uint64_t base_seed = 2026;
  std::filesystem::path output_dir = "results";
  bool write_trades_audit = true;
  bool write_postures = true;
  /// Worker threads for episodes; 0 picks the hardware concurrency.
  int threads = 0;

  /// Rejects unknown mechanism names and empty sweeps before anything runs.
  void validate() const;
};

/// Seed of one (pool size, episode) cell. The mechanism is deliberately not
/// part of the key, so every mechanism replays the same market.
std::uint64_t cell_seed(std::uint64_t base_seed, int buyer_pool_size, int episode);

struct PlanResult {
  std::vector<SummaryRow> summary;
  std::vector<std::filesystem::path> files;
  std::size_t episodes = 0;
};

/// Runs every (mechanism, pool size, episode) cell and aggregates. With
/// `write_files` it writes summary.csv, summary.json, trades_audit.csv,
/// postures.csv and resolved_config.json under `plan.output_dir`.
PlanResult run_plan(const RunPlan& plan, bool write_files = true);

}  // namespace zebris
