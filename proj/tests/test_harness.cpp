#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zebris/config_io.hpp"
#include "zebris/errors.hpp"
#include "zebris/harness.hpp"
#include "zebris/rng.hpp"

using namespace zebris;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunPlan small_plan(const fs::path& out) {
  RunPlan plan;
  plan.scenario.horizon = 12;
  plan.mechanisms = {"ZEBRIS", "ZTOnly", "ResOnly"};
  plan.buyer_pool_sizes = {5, 10};
  plan.episodes_per_cell = 3;
  plan.base_seed = 17;
  plan.output_dir = out;
  plan.threads = 2;
  return plan;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("single empty round") {
  ScenarioConfig sc;
  sc.horizon = 1;
  sc.activation_probability = 0.0;
  const auto res = run_episode(zebris_mechanism(), sc, 1);
  REQUIRE(res.rounds.size() == 1);
  CHECK(res.rounds[0].social_welfare == 0.0);
  CHECK(res.trades.empty());
}

TEST_CASE("episodes are reproducible and seed-sensitive") {
  ScenarioConfig sc;
  sc.horizon = 30;
  sc.buyer_pool_size = 15;
  for (const auto& mech : all_mechanisms()) {
    CAPTURE(mech.name);
    const auto a = run_episode(mech, sc, 5);
    const auto b = run_episode(mech, sc, 5);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
      CHECK(a.rounds[t].social_welfare == b.rounds[t].social_welfare);
      CHECK(a.rounds[t].avg_seller_utility == b.rounds[t].avg_seller_utility);
    }
    CHECK(a.trades.size() == b.trades.size());
    const auto c = run_episode(mech, sc, 6);
    bool differs = a.trades.size() != c.trades.size();
    for (std::size_t t = 0; t < a.rounds.size() && !differs; ++t) {
      differs = a.rounds[t].social_welfare != c.rounds[t].social_welfare;
    }
    CHECK(differs);
  }
}

TEST_CASE("round callback and trade retention") {
  ScenarioConfig sc;
  sc.horizon = 8;
  int calls = 0;
  EpisodeOptions opts;
  opts.keep_trades = false;
  opts.on_round = [&](const RoundInputs& in, const RoundResult& r) {
    CHECK(in.round_index == r.round);
    ++calls;
  };
  const auto res = run_episode(zebris_mechanism(), sc, 3, opts);
  CHECK(calls == 8);
  CHECK(res.trades.empty());
  CHECK(res.ledger.history(0).size() == 8);
}

TEST_CASE("mechanisms share the market of a cell") {
  ScenarioConfig sc;
  sc.horizon = 5;
  std::vector<std::vector<int>> active;
  for (const auto& mech : all_mechanisms()) {
    std::vector<int> counts;
    EpisodeOptions opts;
    opts.on_round = [&](const RoundInputs& in, const RoundResult&) {
      counts.push_back(static_cast<int>(in.buyers.size()));
    };
    run_episode(mech, sc, 21, opts);
    active.push_back(counts);
  }
  for (const auto& a : active) CHECK(a == active.front());
}

TEST_CASE("cell seeds") {
  CHECK(cell_seed(2026, 10, 3) == (2026ULL ^ stable_hash("pool=10/episode=3")));
  CHECK(cell_seed(2026, 10, 3) != cell_seed(2026, 10, 4));
  CHECK(cell_seed(2026, 10, 3) != cell_seed(2026, 15, 3));
  CHECK(cell_seed(2026, 10, 3) != cell_seed(2027, 10, 3));
}

TEST_CASE("plan validation") {
  RunPlan plan;
  CHECK_NOTHROW(plan.validate());
  auto bad = plan;
  bad.mechanisms = {"ZEBRIS", "Bogus"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.mechanisms.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.buyer_pool_sizes.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.episodes_per_cell = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.threads = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  // Rejected before anything is written.
  TempDir dir("zebris_harness_reject");
  bad = small_plan(dir.path / "out");
  bad.mechanisms.push_back("Bogus");
  CHECK_THROWS_AS(run_plan(bad), ConfigError);
  CHECK_FALSE(fs::exists(dir.path / "out"));
}

TEST_CASE("plan outputs") {
  TempDir dir("zebris_harness_plan");
  const auto plan = small_plan(dir.path / "a");
  const auto result = run_plan(plan);
  CHECK(result.episodes == 3 * 2 * 3);
  CHECK(result.summary.size() == 3 * 2 * kAllMetrics.size());
  for (const char* name : {"summary.csv", "summary.json", "trades_audit.csv", "postures.csv",
                           "resolved_config.json"}) {
    CHECK(fs::exists(plan.output_dir / name));
  }
  const auto csv = slurp(plan.output_dir / "summary.csv");
  CHECK(csv.rfind("mechanism,buyer_pool_size,metric,mean,sd,ci95_half_width,n\n", 0) == 0);
  CHECK(csv == summary_csv(result.summary));
  const auto js = nlohmann::json::parse(slurp(plan.output_dir / "summary.json"));
  CHECK(js.size() == result.summary.size());
  const auto postures = slurp(plan.output_dir / "postures.csv");
  CHECK(postures.rfind("mechanism,buyer_pool_size,episode,round,seller_id,posture,average_refund",
                       0) == 0);

  SUBCASE("rerun and thread count do not change the summary") {
    auto again = plan;
    again.output_dir = dir.path / "b";
    again.threads = 1;
    run_plan(again);
    CHECK(slurp(again.output_dir / "summary.csv") == csv);
    CHECK(slurp(again.output_dir / "trades_audit.csv") ==
          slurp(plan.output_dir / "trades_audit.csv"));
  }
  SUBCASE("resolved config reloads to the same plan") {
    const auto reloaded = load_plan(plan.output_dir / "resolved_config.json");
    CHECK(plan_to_json(reloaded) == plan_to_json(plan));
  }
  SUBCASE("audit log reads back and conserves money per round") {
    const auto trades = read_trades_audit(plan.output_dir / "trades_audit.csv");
    REQUIRE_FALSE(trades.empty());
    CHECK(check_prop1(trades).empty());
    CHECK(check_prop2(trades, plan.scenario.mechanism.deposit_cap_ratio).empty());
    CHECK(check_budget(trades).empty());
    using Key = std::tuple<std::string, int, int, int>;
    std::map<Key, std::array<double, 4>> rounds;
    for (const auto& t : trades) {
      auto& r = rounds[{t.mechanism, t.buyer_pool_size, t.episode, t.round}];
      const auto& s = t.settlement;
      r[0] += s.price;
      r[1] += s.price - s.deposit + s.refunded;
      r[2] += s.buyer_compensation;
      r[3] += s.platform_cut;
    }
    for (const auto& [key, r] : rounds) CHECK(std::abs(r[0] - (r[1] + r[2] + r[3])) <= 1e-9);
    std::set<std::string> mechs;
    for (const auto& t : trades) mechs.insert(t.mechanism);
    CHECK(mechs == std::set<std::string>{"ZEBRIS", "ZTOnly", "ResOnly"});
  }
}

TEST_CASE("optional outputs can be skipped") {
  TempDir dir("zebris_harness_skip");
  auto plan = small_plan(dir.path);
  plan.write_trades_audit = false;
  plan.write_postures = false;
  run_plan(plan);
  CHECK_FALSE(fs::exists(dir.path / "trades_audit.csv"));
  CHECK_FALSE(fs::exists(dir.path / "postures.csv"));
  CHECK(fs::exists(dir.path / "summary.csv"));
  const auto in_memory = run_plan(plan, false);
  CHECK(summary_csv(in_memory.summary) == slurp(dir.path / "summary.csv"));
}

TEST_CASE("scenario JSON") {
  ScenarioConfig sc;
  sc.buyer_pool_size = 13;
  sc.mechanism.deposit_cap_ratio = 0.3;
  sc.effort.tau2 = 1.5;
  sc.clearing.strategy = DpStrategy::kSparse;
  sc.package_grid = {2, 3, 1};
  const auto j = scenario_to_json(sc);
  const auto back = scenario_from_json(j);
  CHECK(scenario_to_json(back) == j);
  CHECK(back.buyer_pool_size == 13);
  CHECK(back.clearing.strategy == DpStrategy::kSparse);

  CHECK(scenario_to_json(scenario_from_json(nlohmann::json::object())) ==
        scenario_to_json(ScenarioConfig{}));

  auto unknown = j;
  unknown["surprise"] = 1;
  CHECK_THROWS_AS(scenario_from_json(unknown), ConfigError);
  auto nested = j;
  nested["mechanism"]["typo_coeff"] = 1;
  CHECK_THROWS_AS(scenario_from_json(nested), ConfigError);
  auto wrong_type = j;
  wrong_type["horizon"] = "long";
  CHECK_THROWS_AS(scenario_from_json(wrong_type), ConfigError);
  auto bad_strategy = j;
  bad_strategy["clearing"]["strategy"] = "quantum";
  CHECK_THROWS_AS(scenario_from_json(bad_strategy), ConfigError);
}

TEST_CASE("plan files") {
  TempDir dir("zebris_harness_files");
  CHECK_THROWS_AS(load_plan(dir.path / "missing.json"), IoError);

  std::ofstream(dir.path / "broken.json") << "{ \"mechanisms\": [ ";
  CHECK_THROWS_AS(load_plan(dir.path / "broken.json"), ConfigError);

  std::ofstream(dir.path / "bare.json") << R"({"buyer_pool_size": 7, "horizon": 9})";
  const auto bare = load_plan(dir.path / "bare.json");
  CHECK(bare.scenario.buyer_pool_size == 7);
  CHECK(bare.scenario.horizon == 9);
  CHECK(bare.mechanisms == mechanism_names());

  std::ofstream(dir.path / "plan.json") << R"({
    // comments are allowed
    "scenario": {"horizon": 4},
    "mechanisms": ["ZEBRIS"],
    "buyer_pool_sizes": [3],
    "episodes_per_cell": 2,
    "base_seed": 99,
    "output_dir": "out"
  })";
  const auto plan = load_plan(dir.path / "plan.json");
  CHECK(plan.episodes_per_cell == 2);
  CHECK(plan.base_seed == 99);
  CHECK(plan.scenario.horizon == 4);

  std::ofstream(dir.path / "profile.csv") << "1\n0\n1\n";
  std::ofstream(dir.path / "with_profile.json")
      << R"({"buyer_pool_size": 3, "activation_profile_file": "profile.csv"})";
  const auto prof = load_plan(dir.path / "with_profile.json");
  CHECK(prof.scenario.activation_profile == std::vector<double>{1.0, 0.0, 1.0});
}

TEST_CASE("audit file errors") {
  TempDir dir("zebris_harness_audit");
  CHECK_THROWS_AS(read_trades_audit(dir.path / "missing.csv"), IoError);
  std::ofstream(dir.path / "empty.csv");
  CHECK_THROWS_AS(read_trades_audit(dir.path / "empty.csv"), IoError);
  std::ofstream(dir.path / "short.csv") << "mechanism,round\nZEBRIS,1\n";
  CHECK_THROWS_AS(read_trades_audit(dir.path / "short.csv"), IoError);

  const auto header = trades_audit_header();
  std::ofstream(dir.path / "ragged.csv") << header << "ZEBRIS,1,2\n";
  CHECK_THROWS_AS(read_trades_audit(dir.path / "ragged.csv"), IoError);

  CHECK_THROWS_AS(write_text_file(dir.path / "no" / "such" / "dir.txt", "x"), IoError);
}

TEST_CASE("number formatting round-trips") {
  Rng rng(8);
  for (int k = 0; k < 1000; ++k) {
    const double v = rng.uniform(-1e6, 1e6);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
}

}  // TEST_SUITE
