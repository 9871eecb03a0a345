#pragma once

#include <cstddef>

namespace zebris {

/// Market-wide mechanism coefficients shared by evaluation, settlement and
/// posture evolution. Units: seconds for the delay coefficients, monetary
/// units for the cost and deposit coefficients.
struct MechanismConfig {
  double delay_verif_coeff = 0.10;    // theta1
  double delay_posture_coeff = 0.20;  // theta2
  double compliance_weight = 0.5;     // varpi, weight of z in g(z, q)
  double zt_verif_cost = 1.0;         // psi1
  double zt_posture_cost = 2.0;       // psi2
  double refund_weight_auth = 0.35;   // eta1
  double refund_weight_policy = 0.30; // eta2
  double refund_weight_sla = 0.35;    // eta3
  double deposit_verif_coeff = 3.0;   // mu1
  double deposit_posture_coeff = 3.0; // mu2
  double deposit_cap_ratio = 0.40;    // lambda, open interval (0, 0.5)
  double compensation_share = 0.70;   // chi
  double posture_step = 0.30;         // omega, half-open interval (0, 1]

  /// Throws ConfigError on any violated bound.
  void validate() const;
};

/// Deposit-aware effort and the stochastic compliance generator built on it.
struct EffortModel {
  double tau0 = -1.0;
  double tau1 = 3.0;
  double tau2 = 8.0;
  int auth_events_per_trade = 20;
  int policy_checks_per_trade = 20;
  double violation_scale = 0.6;   // nu
  double delay_inflation = 0.8;   // delta_infl

  void validate() const;
};

/// Discretization step for the clearing DP.
struct ResourceQuantum {
  double bandwidth = 0.5;  // MHz
  double compute = 0.5;    // giga-cycles/s
};

enum class DpStrategy { kAuto, kDense, kSparse };

struct ClearingOptions {
  ResourceQuantum quantum{};
  /// Upper bound on memoized DP states before the solver gives up.
  std::size_t state_cap = 10'000'000;
  /// Full discretized state spaces at most this large use a dense table.
  std::size_t dense_limit = 1u << 15;
  DpStrategy strategy = DpStrategy::kAuto;

  void validate() const;
};

}  // namespace zebris
