#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "support.hpp"
#include "zebris/metrics.hpp"
#include "zebris/rng.hpp"

using namespace zebris;

namespace {

TradeRecord trade(int buyer, double margin, double rho_scores, double beta = 2.0,
                  double xi = 0.1, double delay = 0.4) {
  TradeRecord t;
  t.buyer_id = buyer;
  t.seller_id = 0;
  PackageEvaluation e;
  e.effective_ask = 3.0;
  e.effective_valuation = 3.0 + margin;
  e.margin = margin;
  e.privacy_risk = xi;
  e.package = Package{1, 1, 0.6};
  t.cleared = e;
  t.reference = e;
  t.privacy_penalty = beta;
  t.deadline = 1.0;
  const int succ = static_cast<int>(std::lround(20 * rho_scores));
  t.measurement = ComplianceMeasurement{20, succ, 20, 20 - succ, delay};
  t.settlement = settle_trade(e, 0.5, 1.0, t.measurement, MechanismConfig{});
  return t;
}

ClearingOutcome outcome_of(const std::vector<TradeRecord>& trades) {
  ClearingOutcome out;
  for (const auto& t : trades) {
    CandidatePair p;
    p.buyer_id = t.buyer_id;
    p.seller_id = t.seller_id;
    p.evaluation = t.cleared;
    out.accepted.push_back(p);
    out.welfare += t.cleared.margin;
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("empty round") {
  const auto m = compute_round_metrics({}, {}, 4);
  CHECK(m.social_welfare == 0.0);
  CHECK(m.accepted_trading_ratio == 0.0);
  CHECK_FALSE(m.avg_delay.has_value());
  CHECK_FALSE(m.avg_privacy_cost.has_value());
  CHECK_FALSE(m.avg_compliance.has_value());
  CHECK_FALSE(m.avg_seller_utility.has_value());
  CHECK(compute_round_metrics({}, {}, 0).accepted_trading_ratio == 0.0);
}

TEST_CASE("single fully compliant trade") {
  const std::vector<TradeRecord> t{trade(0, 2.25, 1.0)};
  const auto m = compute_round_metrics(outcome_of(t), t, 1);
  CHECK(m.social_welfare == 2.25);
  CHECK(*m.avg_seller_utility == doctest::Approx(1.125));
  CHECK(*m.avg_compliance == doctest::Approx(1.0));
  CHECK(*m.avg_privacy_cost == doctest::Approx(0.2));
  CHECK(*m.avg_delay == 0.4);
}

TEST_CASE("acceptance ratio") {
  const std::vector<TradeRecord> t{trade(0, 1.0, 1.0), trade(3, 1.0, 1.0)};
  CHECK(compute_round_metrics(outcome_of(t), t, 5).accepted_trading_ratio == doctest::Approx(0.4));
}

TEST_CASE("mismatched settlements") {
  const std::vector<TradeRecord> t{trade(0, 1.0, 1.0), trade(1, 1.0, 1.0)};
  auto out = outcome_of(t);
  out.accepted.pop_back();
  CHECK_THROWS_AS(compute_round_metrics(out, t, 2), std::logic_error);
  out = outcome_of(t);
  std::swap(out.accepted[0], out.accepted[1]);
  CHECK_THROWS_AS(compute_round_metrics(out, t, 2), std::logic_error);
}

TEST_CASE("welfare ignores settlement, compliance equals refund ratio") {
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    std::vector<TradeRecord> t;
    const int n = 1 + static_cast<int>(rng.uniform01() * 5);
    double omega = 0.0;
    for (int i = 0; i < n; ++i) {
      t.push_back(trade(i, rng.uniform(0.1, 5.0), rng.uniform01()));
      omega += t.back().reference.margin;
    }
    const auto base = compute_round_metrics(outcome_of(t), t, n);
    double rho = 0.0;
    for (const auto& x : t) rho += x.settlement.refund_ratio;
    CHECK(*base.avg_compliance == doctest::Approx(rho / n));
    // SU bound with deposits.
    CHECK(*base.avg_seller_utility >= (0.5 - MechanismConfig{}.deposit_cap_ratio) * omega / n - 1e-9);
    // Perturb every refund ratio and resettle.
    auto perturbed = t;
    for (auto& x : perturbed) {
      x.measurement.auth_succeeded = static_cast<int>(rng.uniform01() * 21);
      x.settlement = settle_trade(x.cleared, 0.5, 1.0, x.measurement, MechanismConfig{});
    }
    CHECK(compute_round_metrics(outcome_of(perturbed), perturbed, n).social_welfare ==
          base.social_welfare);
  }
}

TEST_CASE("summary statistics") {
  const std::vector<double> two{10.0, 14.0};
  const auto s = summarize_values(two);
  CHECK(s.mean == 12.0);
  CHECK(s.sd == doctest::Approx(std::sqrt(8.0)));
  CHECK(s.n == 2);
  CHECK(s.half_width == doctest::Approx(1.96 * std::sqrt(8.0) / std::sqrt(2.0)));

  const std::vector<double> same(50, 3.5);
  const auto z = summarize_values(same);
  CHECK(z.sd == 0.0);
  CHECK(z.half_width == 0.0);

  Rng rng(6);
  std::vector<double> fifty;
  for (int k = 0; k < 50; ++k) fifty.push_back(rng.uniform(0, 10));
  const auto f = summarize_values(fifty);
  CHECK(f.half_width == doctest::Approx(1.96 * f.sd / std::sqrt(50.0)));

  CHECK(summarize_values({}).n == 0);
  const std::vector<double> one{4.0};
  CHECK(summarize_values(one).sd == 0.0);
}

TEST_CASE("episode summary averages trade metrics over non-empty rounds") {
  RoundMetrics busy;
  busy.social_welfare = 4.0;
  busy.accepted_trading_ratio = 0.5;
  busy.avg_delay = 0.3;
  busy.platform_revenue = 0.2;
  RoundMetrics idle;
  const std::vector<RoundMetrics> rounds{busy, idle};
  const auto e = summarize_episode(rounds);
  CHECK(*e[static_cast<std::size_t>(Metric::kSW)] == 2.0);
  CHECK(*e[static_cast<std::size_t>(Metric::kATR)] == 0.25);
  CHECK(*e[static_cast<std::size_t>(Metric::kPlatformRevenue)] == 0.1);
  CHECK(*e[static_cast<std::size_t>(Metric::kAED)] == 0.3);
  CHECK_FALSE(e[static_cast<std::size_t>(Metric::kACS)].has_value());
}

TEST_CASE("aggregation keys and order") {
  RoundMetrics r;
  r.social_welfare = 10.0;
  std::vector<EpisodeSeries> eps;
  eps.push_back({"B", 20, 0, {r}});
  r.social_welfare = 14.0;
  eps.push_back({"B", 20, 1, {r}});
  eps.push_back({"A", 10, 0, {r}});
  eps.push_back({"B", 10, 0, {r}});
  const auto rows = aggregate_episodes(eps);
  REQUIRE(rows.size() == 3 * kAllMetrics.size());
  CHECK(rows[0].mechanism == "B");
  CHECK(rows[0].buyer_pool_size == 10);
  CHECK(rows[kAllMetrics.size()].buyer_pool_size == 20);
  const auto& sw = rows[kAllMetrics.size()];
  CHECK(sw.metric == Metric::kSW);
  CHECK(sw.stat.mean == 12.0);
  CHECK(sw.stat.n == 2);
  CHECK(rows[2 * kAllMetrics.size()].mechanism == "A");
  // Undefined trade averages contribute no episodes.
  CHECK(rows[static_cast<std::size_t>(Metric::kAED)].stat.n == 0);
}

TEST_CASE("metric names") {
  std::vector<std::string> names;
  for (Metric m : kAllMetrics) names.emplace_back(metric_name(m));
  CHECK(names == std::vector<std::string>{"SW", "ATR", "AED", "APRC", "ACS", "SU", "PR"});
}

}  // TEST_SUITE
