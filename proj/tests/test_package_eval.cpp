#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "zebris/errors.hpp"
#include "zebris/package_eval.hpp"
#include "zebris/rng.hpp"

using namespace zebris;
using zebris::test::buyer;
using zebris::test::seller;

TEST_SUITE("package_eval") {

TEST_CASE("transmission rate is b log2(1 + sinr)") {
  CHECK(transmission_rate(Package{2.0, 1.0, 0.3}, 3.0) == doctest::Approx(4.0));
  CHECK(transmission_rate(Package{4.0, 1.0, 0.3}, 15.0) == doctest::Approx(16.0));
  CHECK_THROWS_AS(transmission_rate(Package{5.0, 1.0, 0.3}, 0.0), DomainError);
  CHECK_THROWS_AS(transmission_rate(Package{5.0, 1.0, 0.3}, -1.0), DomainError);
  CHECK_THROWS_AS(transmission_rate(Package{0.0, 1.0, 0.3}, 3.0), DomainError);
}

TEST_CASE("service delay adds transfer, compute, verification and posture terms") {
  MechanismConfig cfg;
  cfg.delay_verif_coeff = 0.1;
  cfg.delay_posture_coeff = 0.2;
  auto b = buyer();
  b.data_size_mb = 0.5;
  b.workload_gcycles = 0.5;
  auto s = seller();
  s.posture = 1.0;
  // b = 4 MHz at sinr 3 gives 8 Mbit/s.
  const Package pkg{4.0, 2.0, 0.5};
  const double expected = 8.0 * 0.5 / 8.0 + 0.5 / 2.0 + 0.1 * 0.5 + 0.2 * 0.0;
  CHECK(expected == doctest::Approx(0.80));
  CHECK(service_delay(b, s, pkg, 3.0, cfg) == doctest::Approx(expected));

  SUBCASE("no security overhead at z = 0, q = 1") {
    const Package bare{4.0, 2.0, 0.0};
    CHECK(service_delay(b, s, bare, 3.0, cfg) == doctest::Approx(0.5 + 0.25));
  }
  SUBCASE("zero posture adds exactly theta2") {
    auto weak = s;
    weak.posture = 0.0;
    const Package bare{4.0, 2.0, 0.0};
    CHECK(service_delay(b, weak, bare, 3.0, cfg) - service_delay(b, s, bare, 3.0, cfg) ==
          doctest::Approx(0.2));
  }
  SUBCASE("bad inputs propagate") {
    CHECK_THROWS_AS(service_delay(b, s, Package{4.0, 0.0, 0.5}, 3.0, cfg), DomainError);
    CHECK_THROWS_AS(service_delay(b, s, pkg, 0.0, cfg), DomainError);
  }
}

TEST_CASE("compliance score blends z and q") {
  MechanismConfig cfg;
  for (double w : {0.0, 0.3, 0.5, 1.0}) {
    cfg.compliance_weight = w;
    CHECK(compliance_score(0.7, 0.7, cfg) == doctest::Approx(0.7));
  }
  cfg.compliance_weight = 1.0;
  CHECK(compliance_score(0.42, 0.9, cfg) == 0.42);
  cfg.compliance_weight = 0.5;
  CHECK(compliance_score(0.6, 0.8, cfg) == doctest::Approx(0.7));
}

TEST_CASE("privacy risk vanishes at full verification or perfect posture") {
  auto b = buyer();
  b.privacy_sensitivity = 0.8;
  for (double q : {0.0, 0.4, 1.0}) CHECK(privacy_risk(b, 1.0, q) == 0.0);
  for (double z : {0.0, 0.4, 1.0}) CHECK(privacy_risk(b, z, 1.0) == 0.0);
  CHECK(privacy_risk(b, 0.5, 0.5) == doctest::Approx(0.2));
}

TEST_CASE("zero-trust cost") {
  MechanismConfig cfg;
  CHECK(zt_cost(0.0, 1.0, cfg) == 0.0);
  cfg.zt_verif_cost = 2.0;
  CHECK(zt_cost(0.5, 1.0, cfg) == doctest::Approx(1.0));
  cfg.zt_posture_cost = 1.0;
  CHECK(zt_cost(0.0, 0.6, cfg) == doctest::Approx(0.4));
}

TEST_CASE("evaluate_package assembles valuation, ask and margin") {
  MechanismConfig cfg;
  cfg.zt_verif_cost = 1.0;
  cfg.zt_posture_cost = 0.6;
  auto b = buyer();
  b.data_size_mb = 0.5;
  b.workload_gcycles = 0.3;
  b.gross_valuation = 12.0;
  b.delay_penalty = 4.0;
  b.privacy_penalty = 3.0;
  b.privacy_sensitivity = 0.8;
  b.deadline_s = 1.0;
  b.min_security = 0.5;
  auto s = seller();
  s.posture = 0.5;
  s.base_ask = 3.0;
  s.unit_bandwidth_cost = 0.1;
  s.unit_compute_cost = 0.2;
  const Package pkg{4.0, 2.0, 0.5};

  const auto e = evaluate_package(b, s, pkg, 3.0, cfg);
  // D = 0.5 + 0.15 + 0.05 + 0.1, xi = 0.8 * 0.25, C_zt = 0.5 + 0.3.
  CHECK(e.rate == doctest::Approx(8.0));
  CHECK(e.delay == doctest::Approx(0.8));
  CHECK(e.privacy_risk == doctest::Approx(0.2));
  CHECK(e.zt_cost == doctest::Approx(0.8));
  CHECK(e.effective_valuation == doctest::Approx(12.0 - 3.2 - 0.6));
  CHECK(e.effective_valuation == doctest::Approx(8.2));
  CHECK(e.effective_ask == doctest::Approx(3.0 + 0.4 + 0.4 + 0.8));
  CHECK(e.effective_ask == doctest::Approx(4.6));
  CHECK(e.margin == e.effective_valuation - e.effective_ask);
  CHECK(e.compliance_score == doctest::Approx(0.5));
  CHECK(e.feasible);

  SUBCASE("deadline and security screen") {
    auto tight = b;
    tight.deadline_s = 0.79;
    CHECK_FALSE(evaluate_package(tight, s, pkg, 3.0, cfg).feasible);
    auto strict = b;
    strict.min_security = 0.51;
    CHECK_FALSE(evaluate_package(strict, s, pkg, 3.0, cfg).feasible);
    ValuationView lax;
    lax.security_constraint = false;
    CHECK(evaluate_package(strict, s, pkg, 3.0, cfg, lax).feasible);
  }
  SUBCASE("zero margin never becomes a candidate") {
    auto even = b;
    even.gross_valuation += e.effective_ask - e.effective_valuation;
    const auto z = evaluate_package(even, s, pkg, 3.0, cfg);
    CHECK(z.margin == doctest::Approx(0.0).epsilon(1e-12));
    PairEvaluation pe{0, 0, z};
    pe.best->margin = 0.0;
    CHECK(build_candidate_set(std::vector<PairEvaluation>{pe}).empty());
  }
  SUBCASE("view switches drop terms") {
    ValuationView raw;
    raw.delay_penalty = false;
    raw.privacy_penalty = false;
    raw.zt_cost = false;
    const auto r = evaluate_package(b, s, pkg, 3.0, cfg, raw);
    CHECK(r.effective_valuation == 12.0);
    CHECK(r.effective_ask == doctest::Approx(3.8));
    CHECK(r.delay == doctest::Approx(0.8));
  }
  SUBCASE("custom security model") {
    SecurityModel sm = SecurityModel::standard();
    sm.compliance = [](double z, double q, const MechanismConfig&) { return std::min(z, q); };
    sm.privacy_shape = [](double z, double) { return 1.0 - z; };
    const auto c = evaluate_package(b, s, Package{4.0, 2.0, 0.3}, 3.0, cfg, {}, sm);
    CHECK(c.compliance_score == doctest::Approx(0.3));
    CHECK(c.privacy_risk == doctest::Approx(0.8 * 0.7));
  }
}

TEST_CASE("best_feasible_package") {
  MechanismConfig cfg;
  auto b = buyer();
  auto s = seller();

  SUBCASE("nothing meets the deadline") {
    b.deadline_s = 1e-6;
    const std::vector<Package> c{{2.0, 6.0, 0.3}, {8.0, 24.0, 0.9}};
    CHECK_FALSE(best_feasible_package(b, s, c, 10.0, cfg).has_value());
  }
  SUBCASE("singleton is returned whatever its margin") {
    b.gross_valuation = 0.5;
    b.min_security = 0.0;
    const std::vector<Package> c{{8.0, 24.0, 0.9}};
    const auto best = best_feasible_package(b, s, c, 10.0, cfg);
    REQUIRE(best.has_value());
    CHECK(best->margin < 0.0);
  }
  SUBCASE("argmax of two feasible margins") {
    ValuationView raw;
    raw.delay_penalty = raw.privacy_penalty = raw.zt_cost = false;
    raw.security_constraint = false;
    b.gross_valuation = 10.0;
    b.deadline_s = 100.0;
    s.base_ask = 3.0;
    s.unit_bandwidth_cost = 0.5;
    s.unit_compute_cost = 0.25;
    const std::vector<Package> c{{5.0, 12.0, 0.3}, {4.0, 11.0, 0.3}};
    // Exhaustive scan oracle over the two candidates.
    std::vector<double> margins;
    for (const auto& p : c) margins.push_back(10.0 - 3.0 - 0.5 * p.bandwidth - 0.25 * p.compute);
    CHECK(margins[0] == 1.5);
    CHECK(margins[1] == 2.25);
    const auto best = best_feasible_package(b, s, c, 10.0, cfg, raw);
    REQUIRE(best.has_value());
    CHECK(best->margin == 2.25);
    CHECK(best->package == c[1]);
  }
  SUBCASE("equal margins prefer the smaller footprint") {
    ValuationView raw;
    raw.delay_penalty = raw.privacy_penalty = raw.zt_cost = false;
    raw.security_constraint = false;
    b.deadline_s = 100.0;
    s.unit_bandwidth_cost = 0.5;
    s.unit_compute_cost = 1.0;
    const std::vector<Package> c{{4.0, 3.0, 0.6}, {2.0, 4.0, 0.6}, {2.0, 4.0, 0.3}};
    const auto best = best_feasible_package(b, s, c, 10.0, cfg, raw);
    REQUIRE(best.has_value());
    CHECK(best->package == Package{2.0, 4.0, 0.3});
  }
}

TEST_CASE("monotonicity over a z, q grid") {
  MechanismConfig cfg;
  const auto b = buyer();
  auto s = seller();
  const Package base{4.0, 8.0, 0.0};
  const int n = 20;
  for (int i = 0; i <= n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double x = static_cast<double>(i) / n;
      const double lo = static_cast<double>(k) / n, hi = static_cast<double>(k + 1) / n;
      // z increasing at fixed q = x.
      CHECK(compliance_score(hi, x, cfg) >= compliance_score(lo, x, cfg));
      CHECK(privacy_risk(b, hi, x) <= privacy_risk(b, lo, x));
      // q increasing at fixed z = x.
      auto s_lo = s, s_hi = s;
      s_lo.posture = lo;
      s_hi.posture = hi;
      const Package p{base.bandwidth, base.compute, x};
      CHECK(service_delay(b, s_hi, p, 10.0, cfg) <= service_delay(b, s_lo, p, 10.0, cfg));
      CHECK(privacy_risk(b, x, hi) <= privacy_risk(b, x, lo));
      CHECK(zt_cost(x, hi, cfg) <= zt_cost(x, lo, cfg));
      CHECK(compliance_score(x, hi, cfg) >= compliance_score(x, lo, cfg));
    }
  }
}

TEST_CASE("random pairs: argmax, feasibility and exact margin decomposition") {
  ScenarioConfig sc;
  Rng rng(7);
  const auto profiles = sample_seller_profiles(sc, rng);
  std::vector<double> q;
  for (const auto& p : profiles) q.push_back(p.initial_posture);
  int checked = 0;
  for (int round = 0; round < 40; ++round) {
    const auto in = sample_round(sc, rng, round, profiles, q);
    for (const auto& b : in.buyers) {
      for (const auto& s : in.sellers) {
        const auto cands = enumerate_candidates(b, s, sc);
        const double sinr = in.channel.sinr(b.buyer_id, s.seller_id);
        const auto best = best_feasible_package(b, s, cands, sinr, sc.mechanism);
        double top = -INFINITY;
        bool any = false;
        for (const auto& p : cands) {
          const auto e = evaluate_package(b, s, p, sinr, sc.mechanism);
          CHECK(e.margin == e.effective_valuation - e.effective_ask);
          CHECK(e.compliance_score >= 0.0);
          CHECK(e.compliance_score <= 1.0);
          CHECK(e.privacy_risk >= 0.0);
          CHECK(e.rate > 0.0);
          CHECK(e.feasible == (e.delay <= b.deadline_s && e.compliance_score >= b.min_security));
          if (e.feasible) {
            any = true;
            top = std::max(top, e.margin);
          }
        }
        CHECK(best.has_value() == any);
        if (best) {
          CHECK(best->margin == top);
          CHECK(best->delay <= b.deadline_s);
          CHECK(best->compliance_score >= b.min_security);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 100);
}

}  // TEST_SUITE
