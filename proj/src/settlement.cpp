#include "zebris/settlement.hpp"

#include <algorithm>

namespace zebris {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

bool ComplianceMeasurement::satisfies_invariants() const {
  return auth_succeeded >= 0 && auth_succeeded <= auth_requested && violations >= 0 &&
         violations <= checks && realized_delay > 0.0;
}

double midpoint_price(double effective_valuation, double effective_ask) {
  return (effective_valuation + effective_ask) / 2.0;
}

double capped_deposit(double verification, double posture, double margin,
                      const MechanismConfig& cfg) {
  const double raw =
      cfg.deposit_verif_coeff * verification + cfg.deposit_posture_coeff * (1.0 - posture);
  return std::min(raw, cfg.deposit_cap_ratio * margin);
}

ComplianceScores compliance_scores(const ComplianceMeasurement& m, double deadline) {
  ComplianceScores s;
  s.authentication =
      static_cast<double>(m.auth_succeeded) / static_cast<double>(std::max(1, m.auth_requested));
  s.policy = clamp01(1.0 - static_cast<double>(m.violations) /
                               static_cast<double>(std::max(1, m.checks)));
  const double overrun = std::max(0.0, m.realized_delay - deadline);
  s.sla = clamp01(1.0 - overrun / deadline);
  return s;
}

double refund_ratio(const ComplianceScores& scores, const MechanismConfig& cfg) {
  return cfg.refund_weight_auth * scores.authentication + cfg.refund_weight_policy * scores.policy +
         cfg.refund_weight_sla * scores.sla;
}

double assigned_deposit(const PackageEvaluation& evaluation, double posture,
                        const MechanismConfig& cfg, const SettlementPolicy& policy) {
  if (!policy.deposit_enabled) return 0.0;
  return capped_deposit(evaluation.package.verification, posture, evaluation.margin, cfg);
}

SettlementRecord settle_trade(const PackageEvaluation& evaluation, double posture, double deadline,
                              const ComplianceMeasurement& measurement, const MechanismConfig& cfg,
                              const SettlementPolicy& policy) {
  SettlementRecord r;
  r.price = midpoint_price(evaluation.effective_valuation, evaluation.effective_ask);
  r.deposit = assigned_deposit(evaluation, posture, cfg, policy);
  r.scores = compliance_scores(measurement, deadline);
  r.refund_ratio = refund_ratio(r.scores, cfg);
  r.refunded = r.refund_ratio * r.deposit;
  r.forfeited = r.deposit - r.refunded;
  r.buyer_compensation = policy.compensation_enabled ? cfg.compensation_share * r.forfeited : 0.0;
  r.platform_cut = r.forfeited - r.buyer_compensation;
  r.buyer_utility = evaluation.effective_valuation - r.price + r.buyer_compensation;
  r.seller_utility = r.price - evaluation.effective_ask - r.forfeited;
  return r;
}

}  // namespace zebris
