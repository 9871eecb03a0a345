// Command-line front end: run plans, validate configs, run the clearing
// oracle, and audit trade logs.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "zebris/config_io.hpp"
#include "zebris/errors.hpp"
#include "zebris/harness.hpp"
#include "zebris/invariants.hpp"
#include "zebris/oracle.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> mechanisms;
  std::vector<int> buyers;
  int episodes = 0;
  int threads = -1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed for the plan");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--mechanism", o.mechanisms, "Restrict to these mechanisms (repeatable)");
  cmd->add_option("--buyers", o.buyers, "Restrict to these buyer-pool sizes (repeatable)");
  cmd->add_option("--episodes", o.episodes, "Episodes per (mechanism, pool size) cell");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

zebris::RunPlan resolve(const std::string& path, const Overrides& o) {
  auto plan = path.empty() ? zebris::RunPlan{} : zebris::load_plan(path);
  if (o.seed) plan.base_seed = *o.seed;
  if (!o.out.empty()) plan.output_dir = o.out;
  if (!o.mechanisms.empty()) plan.mechanisms = o.mechanisms;
  if (!o.buyers.empty()) plan.buyer_pool_sizes = o.buyers;
  if (o.episodes > 0) plan.episodes_per_cell = o.episodes;
  if (o.threads >= 0) plan.threads = o.threads;
  return plan;
}

void print_violations(const std::vector<zebris::ViolationReport>& v) {
  for (const auto& r : v) {
    std::cout << r.invariant << " round=" << r.round << " buyer=" << r.buyer_id
              << " seller=" << r.seller_id << " observed=" << zebris::format_number(r.observed)
              << " bound=" << zebris::format_number(r.bound) << " : " << r.detail << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-trust bilateral edge-service market simulator"};
  app.require_subcommand(1);

  std::string plan_path;
  Overrides run_overrides, validate_overrides;

  auto* run = app.add_subcommand("run", "Run a plan and write results");
  run->add_option("plan", plan_path, "Plan or scenario file (JSON)")->check(CLI::ExistingFile);
  add_overrides(run, run_overrides);

  auto* validate = app.add_subcommand("validate", "Check a plan or scenario file without running");
  validate->add_option("plan", plan_path, "Plan or scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_overrides(validate, validate_overrides);

  int oracle_instances = 500;
  std::uint64_t oracle_seed = 1;
  int oracle_buyers = 5, oracle_sellers = 3;
  auto* oracle = app.add_subcommand("oracle", "DP vs brute-force clearing on random instances");
  oracle->add_option("--instances", oracle_instances, "Number of random instances");
  oracle->add_option("--seed", oracle_seed, "Instance generator seed");
  oracle->add_option("--max-buyers", oracle_buyers, "Largest buyer count")->check(CLI::Range(1, 6));
  oracle->add_option("--max-sellers", oracle_sellers, "Largest seller count")->check(CLI::Range(1, 3));

  std::string audit_path;
  auto* check = app.add_subcommand("check", "Audit a trades_audit.csv against the invariants");
  check->add_option("audit", audit_path, "trades_audit.csv")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto plan = resolve(plan_path, run_overrides);
      const auto result = zebris::run_plan(plan);
      std::cout << "ran " << result.episodes << " episodes\n";
      for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
      return 0;
    }
    if (*validate) {
      const auto plan = resolve(plan_path, validate_overrides);
      plan.validate();
      std::cout << "ok: " << plan.mechanisms.size() << " mechanisms x "
                << plan.buyer_pool_sizes.size() << " pool sizes x " << plan.episodes_per_cell
                << " episodes = "
                << plan.mechanisms.size() * plan.buyer_pool_sizes.size() * plan.episodes_per_cell
                << " episodes of " << plan.scenario.horizon << " rounds\n";
      return 0;
    }
    if (*oracle) {
      const auto report =
          zebris::run_clearing_oracle(oracle_instances, oracle_seed, oracle_buyers, oracle_sellers);
      for (const auto& m : report.mismatches) {
        std::cout << "mismatch instance=" << m.instance
                  << " dp=" << zebris::format_number(m.dp_welfare)
                  << " brute_force=" << zebris::format_number(m.brute_force_welfare) << '\n';
      }
      std::cout << report.instances << " instances, " << report.mismatches.size()
                << " mismatches\n";
      return report.mismatches.empty() ? 0 : 1;
    }
    if (*check) {
      const auto trades = zebris::read_trades_audit(audit_path);
      std::size_t total = 0;
      auto p1 = zebris::check_prop1(trades);
      print_violations(p1);
      total += p1.size();
      // Each row carries the deposit cap in force for that trade.
      std::vector<zebris::ViolationReport> p2;
      for (const auto& t : trades) {
        auto v = zebris::check_prop2(std::span(&t, 1), t.deposit_cap_ratio);
        p2.insert(p2.end(), v.begin(), v.end());
      }
      print_violations(p2);
      total += p2.size();
      auto budget = zebris::check_budget(trades);
      print_violations(budget);
      total += budget.size();
      std::cout << trades.size() << " trades checked, " << total << " violations\n";
      return total == 0 ? 0 : 1;
    }
  } catch (const zebris::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
