#include "zebris/mechanisms.hpp"

#include <algorithm>

#include "zebris/errors.hpp"
#include "zebris/runtime_sim.hpp"

namespace zebris {

ValuationView MechanismSpec::view() const {
  ValuationView v;
  const bool raw = clearing_rule == ClearingRule::kRawMarginDp;
  v.delay_penalty = !raw;
  v.privacy_penalty = use_privacy_penalty;
  v.zt_cost = use_zt_cost;
  v.security_constraint = enforce_security_constraint;
  v.deadline_constraint = enforce_deadline;
  return v;
}

SettlementPolicy MechanismSpec::settlement_policy() const {
  return SettlementPolicy{deposit_enabled, compensation_enabled};
}

MechanismSpec zebris_mechanism() { return MechanismSpec{.name = "ZEBRIS"}; }

MechanismSpec zebris_static_mechanism() {
  return MechanismSpec{.name = "ZEBRIS-S", .posture_dynamic = false};
}

MechanismSpec zt_only_mechanism() {
  return MechanismSpec{.name = "ZTOnly",
                       .deposit_enabled = false,
                       .posture_dynamic = false,
                       .compensation_enabled = false};
}

// Privacy-aware clearing without deposit-refund regulation. Posture feedback
// stays on: removing it would make this identical to ZTOnly.
MechanismSpec privacy_aware_mechanism() {
  return MechanismSpec{.name = "PAware", .deposit_enabled = false};
}

MechanismSpec ask_first_mechanism() {
  return MechanismSpec{.name = "AskFirst",
                       .deposit_enabled = false,
                       .posture_dynamic = false,
                       .clearing_rule = ClearingRule::kAskFirstGreedy};
}

MechanismSpec resource_only_mechanism() {
  return MechanismSpec{.name = "ResOnly",
                       .use_privacy_penalty = false,
                       .use_zt_cost = false,
                       .enforce_security_constraint = false,
                       .deposit_enabled = false,
                       .posture_dynamic = false,
                       .compensation_enabled = false,
                       .clearing_rule = ClearingRule::kRawMarginDp};
}

std::vector<MechanismSpec> all_mechanisms() {
  return {zebris_mechanism(),         zebris_static_mechanism(), zt_only_mechanism(),
          privacy_aware_mechanism(),  ask_first_mechanism(),     resource_only_mechanism()};
}

std::vector<std::string> mechanism_names() {
  std::vector<std::string> names;
  for (const auto& m : all_mechanisms()) names.push_back(m.name);
  return names;
}

MechanismSpec mechanism_by_name(std::string_view name) {
  for (auto& m : all_mechanisms()) {
    if (m.name == name) return m;
  }
  std::string valid;
  for (const auto& n : mechanism_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown mechanism '" + std::string(name) + "'; valid names: " + valid);
}

std::vector<PairEvaluation> evaluate_pairs(const MechanismSpec& mechanism, const RoundInputs& in,
                                           const ScenarioConfig& scenario) {
  const auto view = mechanism.view();
  std::vector<PairEvaluation> out;
  out.reserve(in.buyers.size() * in.sellers.size());
  for (const auto& b : in.buyers) {
    for (const auto& s : in.sellers) {
      const auto candidates = enumerate_candidates(b, s, scenario);
      const double sinr = in.channel.sinr(b.buyer_id, s.seller_id);
      out.push_back({b.buyer_id, s.seller_id,
                     best_feasible_package(b, s, candidates, sinr, scenario.mechanism, view)});
    }
  }
  return out;
}

std::vector<SellerCapacity> round_capacities(const RoundInputs& in) {
  std::vector<SellerCapacity> caps;
  caps.reserve(in.sellers.size());
  for (const auto& s : in.sellers) caps.push_back({s.seller_id, s.bandwidth_mhz, s.compute_gcps});
  return caps;
}

ClearingOutcome clear_candidates(const MechanismSpec& mechanism,
                                 std::span<const CandidatePair> candidates,
                                 std::span<const SellerCapacity> sellers,
                                 const ClearingOptions& options) {
  if (mechanism.clearing_rule == ClearingRule::kAskFirstGreedy) {
    return ask_first_clear(candidates, sellers, options.quantum);
  }
  return dp_clear(quantize_resources(candidates, sellers, options.quantum), options);
}

RoundResult run_round(const MechanismSpec& mechanism, const RoundInputs& in,
                      const ScenarioConfig& scenario, PostureLedger& ledger,
                      std::uint64_t runtime_seed) {
  const auto& cfg = scenario.mechanism;
  RoundResult result;
  result.round = in.round_index;
  result.active_buyers = static_cast<int>(in.buyers.size());
  result.posture_before.assign(ledger.postures().begin(), ledger.postures().end());

  // Screening, best packages and the positive-margin candidate set.
  const auto evaluations = evaluate_pairs(mechanism, in, scenario);
  result.candidates = build_candidate_set(evaluations);

  // Clearing.
  const auto capacities = round_capacities(in);
  result.outcome = clear_candidates(mechanism, result.candidates, capacities, scenario.clearing);

  // Pricing, deposits, execution and settlement per accepted trade.
  const auto policy = mechanism.settlement_policy();
  std::vector<std::vector<double>> refunds(in.sellers.size());
  for (const auto& pair : result.outcome.accepted) {
    const auto buyer = std::find_if(in.buyers.begin(), in.buyers.end(),
                                    [&](const auto& b) { return b.buyer_id == pair.buyer_id; });
    const auto& seller = in.sellers.at(static_cast<std::size_t>(pair.seller_id));

    TradeRecord t;
    t.round = in.round_index;
    t.buyer_id = pair.buyer_id;
    t.seller_id = pair.seller_id;
    t.cleared = pair.evaluation;
    t.reference = evaluate_package(*buyer, seller, pair.evaluation.package,
                                   in.channel.sinr(pair.buyer_id, pair.seller_id), cfg);
    t.posture = seller.posture;
    t.deadline = buyer->deadline_s;
    t.privacy_penalty = buyer->privacy_penalty;

    const double deposit = assigned_deposit(t.cleared, t.posture, cfg, policy);
    t.effort = effort_level(t.posture, deposit, t.cleared.effective_ask, scenario.effort);
    Rng runtime(derive_seed(runtime_seed, in.round_index, pair.buyer_id, pair.seller_id));
    t.measurement = draw_compliance(t.effort, t.cleared.delay, scenario.effort, runtime);
    t.settlement = settle_trade(t.cleared, t.posture, t.deadline, t.measurement, cfg, policy);

    refunds.at(static_cast<std::size_t>(pair.seller_id)).push_back(t.settlement.refund_ratio);
    result.trades.push_back(std::move(t));
  }

  // Posture feedback, applied after every settlement of the round.
  ledger.apply_round(in.round_index, refunds, cfg.posture_step, mechanism.posture_dynamic);
  for (std::size_t j = 0; j < in.sellers.size(); ++j) {
    result.average_refund.push_back(ledger.history(static_cast<int>(j)).back().average_refund);
  }
  return result;
}

}  // namespace zebris
