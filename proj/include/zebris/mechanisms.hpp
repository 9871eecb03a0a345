#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "zebris/clearing.hpp"
#include "zebris/market_model.hpp"
#include "zebris/package_eval.hpp"
#include "zebris/posture.hpp"
#include "zebris/settlement.hpp"

namespace zebris {

enum class ClearingRule { kMarginDp, kAskFirstGreedy, kRawMarginDp };

/// A market mechanism expressed as switches over the common round pipeline:
/// screen -> clear -> price/deposit -> execute -> settle -> posture feedback.
struct MechanismSpec {
  std::string name;
  bool use_privacy_penalty = true;
  bool use_zt_cost = true;
  bool enforce_security_constraint = true;
  bool deposit_enabled = true;
  bool posture_dynamic = true;
  bool compensation_enabled = true;
  bool enforce_deadline = true;
  ClearingRule clearing_rule = ClearingRule::kMarginDp;

  /// Valuation terms this mechanism clears on. Raw-margin clearing drops the
  /// delay penalty along with the privacy and zero-trust terms.
  ValuationView view() const;
  SettlementPolicy settlement_policy() const;
};

MechanismSpec zebris_mechanism();
MechanismSpec zebris_static_mechanism();
MechanismSpec zt_only_mechanism();
MechanismSpec privacy_aware_mechanism();
MechanismSpec ask_first_mechanism();
MechanismSpec resource_only_mechanism();

/// ZEBRIS followed by the five baselines.
std::vector<MechanismSpec> all_mechanisms();
std::vector<std::string> mechanism_names();

/// Throws ConfigError listing the valid names.
MechanismSpec mechanism_by_name(std::string_view name);

/// One executed trade with both the mechanism's own valuation and the full
/// zero-trust valuation of the same package.
struct TradeRecord {
  int round = 0;
  int buyer_id = 0;
  int seller_id = 0;
  PackageEvaluation cleared{};    // as the mechanism valued it
  PackageEvaluation reference{};  // full zero-trust evaluation
  double posture = 0.0;           // seller posture when cleared
  double deadline = 0.0;
  double privacy_penalty = 0.0;   // beta of the buyer
  double effort = 0.0;
  ComplianceMeasurement measurement{};
  SettlementRecord settlement{};
};

struct RoundResult {
  int round = 0;
  int active_buyers = 0;
  std::vector<CandidatePair> candidates;
  ClearingOutcome outcome;
  std::vector<TradeRecord> trades;      // ascending buyer id
  std::vector<double> average_refund;   // per seller id
  std::vector<double> posture_before;   // per seller id
};

/// Best package for every active buyer-seller pair under the mechanism's view.
std::vector<PairEvaluation> evaluate_pairs(const MechanismSpec& mechanism, const RoundInputs& in,
                                           const ScenarioConfig& scenario);

/// Seller capacities of a round in seller-id order.
std::vector<SellerCapacity> round_capacities(const RoundInputs& in);

/// Clears a round's candidate set with the mechanism's clearing rule.
ClearingOutcome clear_candidates(const MechanismSpec& mechanism,
                                 std::span<const CandidatePair> candidates,
                                 std::span<const SellerCapacity> sellers,
                                 const ClearingOptions& options);

/// Runs one round end to end and applies the posture update to `ledger`.
/// Runtime draws for trade (buyer, seller) come from a stream derived from
/// (runtime_seed, round, buyer, seller), so mechanisms facing the same
/// round share their randomness.
RoundResult run_round(const MechanismSpec& mechanism, const RoundInputs& in,
                      const ScenarioConfig& scenario, PostureLedger& ledger,
                      std::uint64_t runtime_seed);

}  // namespace zebris
