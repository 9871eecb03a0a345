#include "zebris/params.hpp"

#include <cmath>
#include <string>

#include "zebris/errors.hpp"

namespace zebris {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void MechanismConfig::validate() const {
  require(delay_verif_coeff > 0.0, "mechanism.delay_verif_coeff must be > 0");
  require(delay_posture_coeff > 0.0, "mechanism.delay_posture_coeff must be > 0");
  require(compliance_weight >= 0.0 && compliance_weight <= 1.0,
          "mechanism.compliance_weight must lie in [0,1]");
  require(zt_verif_cost > 0.0, "mechanism.zt_verif_cost must be > 0");
  require(zt_posture_cost > 0.0, "mechanism.zt_posture_cost must be > 0");
  require(refund_weight_auth >= 0.0 && refund_weight_policy >= 0.0 && refund_weight_sla >= 0.0,
          "mechanism.refund_weights must be nonnegative");
  require(std::abs(refund_weight_auth + refund_weight_policy + refund_weight_sla - 1.0) <= 1e-12,
          "mechanism.refund_weights must sum to 1");
  require(deposit_verif_coeff > 0.0, "mechanism.deposit_verif_coeff must be > 0");
  require(deposit_posture_coeff > 0.0, "mechanism.deposit_posture_coeff must be > 0");
  require(deposit_cap_ratio > 0.0 && deposit_cap_ratio < 0.5,
          "mechanism.deposit_cap_ratio must lie in (0, 0.5)");
  require(compensation_share >= 0.0 && compensation_share <= 1.0,
          "mechanism.compensation_share must lie in [0,1]");
  require(posture_step > 0.0 && posture_step <= 1.0, "mechanism.posture_step must lie in (0,1]");
}

void EffortModel::validate() const {
  require(std::isfinite(tau0) && std::isfinite(tau1) && std::isfinite(tau2),
          "effort coefficients must be finite");
  require(auth_events_per_trade >= 1, "effort.auth_events_per_trade must be >= 1");
  require(policy_checks_per_trade >= 1, "effort.policy_checks_per_trade must be >= 1");
  require(violation_scale >= 0.0 && violation_scale <= 1.0,
          "effort.violation_scale must lie in [0,1]");
  require(delay_inflation >= 0.0, "effort.delay_inflation must be >= 0");
}

void ClearingOptions::validate() const {
  require(quantum.bandwidth > 0.0 && quantum.compute > 0.0,
          "clearing.quantum components must be > 0");
  require(state_cap >= 1, "clearing.state_cap must be >= 1");
}

}  // namespace zebris
