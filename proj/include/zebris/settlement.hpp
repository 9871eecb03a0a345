#pragma once

#include "zebris/package_eval.hpp"
#include "zebris/params.hpp"

namespace zebris {

/// Runtime observations for one executed trade.
struct ComplianceMeasurement {
  int auth_requested = 0;
  int auth_succeeded = 0;
  int checks = 0;
  int violations = 0;
  double realized_delay = 0.0;  // s

  bool satisfies_invariants() const;
};

struct ComplianceScores {
  double authentication = 0.0;  // A
  double policy = 0.0;          // G
  double sla = 0.0;             // S
};

struct SettlementRecord {
  double price = 0.0;               // p
  double deposit = 0.0;             // Delta
  ComplianceScores scores{};
  double refund_ratio = 0.0;        // rho
  double refunded = 0.0;            // Gamma
  double forfeited = 0.0;           // Lambda
  double buyer_compensation = 0.0;  // C_cmp
  double platform_cut = 0.0;        // C_plt
  double buyer_utility = 0.0;       // U_B
  double seller_utility = 0.0;      // U_S
};

/// Which parts of the ex-post regulation a mechanism applies.
struct SettlementPolicy {
  bool deposit_enabled = true;
  bool compensation_enabled = true;
};

double midpoint_price(double effective_valuation, double effective_ask);

/// min(mu1*z + mu2*(1-q), lambda*margin).
double capped_deposit(double verification, double posture, double margin,
                      const MechanismConfig& cfg);

ComplianceScores compliance_scores(const ComplianceMeasurement& m, double deadline);

/// eta-weighted sum of (A, G, S).
double refund_ratio(const ComplianceScores& scores, const MechanismConfig& cfg);

/// Deposit the mechanism escrows for a trade at clearing time.
double assigned_deposit(const PackageEvaluation& evaluation, double posture,
                        const MechanismConfig& cfg, const SettlementPolicy& policy);

/// Prices, refunds and utilities for one accepted trade. `evaluation` is the
/// trade's best package as seen by the clearing mechanism.
SettlementRecord settle_trade(const PackageEvaluation& evaluation, double posture, double deadline,
                              const ComplianceMeasurement& measurement, const MechanismConfig& cfg,
                              const SettlementPolicy& policy = {});

}  // namespace zebris
