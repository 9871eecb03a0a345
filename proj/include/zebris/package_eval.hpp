#pragma once

#include <functional>
#include <optional>
#include <span>

#include "zebris/market_model.hpp"
#include "zebris/params.hpp"

namespace zebris {

/// Which terms a mechanism internalizes when it values a package. The
/// default view is the full zero-trust evaluation.
struct ValuationView {
  bool delay_penalty = true;
  bool privacy_penalty = true;
  bool zt_cost = true;
  bool security_constraint = true;
  bool deadline_constraint = true;
};

/// Security compliance score g(z, q) and privacy-risk shape phi(z, q).
/// Replaceable; defaults are the linear blend and (1-z)(1-q).
struct SecurityModel {
  std::function<double(double z, double q, const MechanismConfig&)> compliance;
  std::function<double(double z, double q)> privacy_shape;

  static SecurityModel standard();
};

struct PackageEvaluation {
  Package package{};
  double rate = 0.0;                 // Mbit/s
  double delay = 0.0;                // s
  double compliance_score = 0.0;     // g
  double privacy_risk = 0.0;         // xi
  double zt_cost = 0.0;              // C_zt
  double effective_valuation = 0.0;  // v_hat
  double effective_ask = 0.0;        // a_hat
  double margin = 0.0;               // Omega = v_hat - a_hat
  bool feasible = false;
};

/// b * log2(1 + sinr); bandwidth in MHz gives Mbit/s.
double transmission_rate(const Package& package, double sinr);

/// 8*L/r + C/f + theta1*z + theta2*(1-q).
double service_delay(const BuyerRequest& buyer, const SellerState& seller, const Package& package,
                     double sinr, const MechanismConfig& cfg);

double compliance_score(double z, double q, const MechanismConfig& cfg);

double privacy_risk(const BuyerRequest& buyer, double z, double q);

double zt_cost(double z, double q, const MechanismConfig& cfg);

PackageEvaluation evaluate_package(const BuyerRequest& buyer, const SellerState& seller,
                                   const Package& package, double sinr,
                                   const MechanismConfig& cfg, const ValuationView& view = {},
                                   const SecurityModel& security = SecurityModel::standard());

/// Highest-margin feasible candidate; ties go to lower bandwidth, then lower
/// compute, then lower verification. Empty when nothing is feasible.
std::optional<PackageEvaluation> best_feasible_package(
    const BuyerRequest& buyer, const SellerState& seller, std::span<const Package> candidates,
    double sinr, const MechanismConfig& cfg, const ValuationView& view = {},
    const SecurityModel& security = SecurityModel::standard());

}  // namespace zebris
