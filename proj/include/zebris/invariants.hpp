#pragma once

#include <span>
#include <string>
#include <vector>

#include "zebris/mechanisms.hpp"
#include "zebris/posture.hpp"
#include "zebris/settlement.hpp"

namespace zebris {

inline constexpr double kInvariantTolerance = 1e-9;

/// The settlement-relevant slice of one trade, as written to the audit log.
struct AuditedTrade {
  std::string mechanism;
  int buyer_pool_size = 0;
  int episode = 0;
  int round = 0;
  int buyer_id = 0;
  int seller_id = 0;
  double margin = 0.0;               // Omega* as cleared
  double effective_valuation = 0.0;  // v_hat*
  double effective_ask = 0.0;        // a_hat*
  bool deposit_enabled = true;
  double deposit_cap_ratio = 0.0;    // lambda in force
  SettlementRecord settlement{};
};

AuditedTrade audit_trade(const TradeRecord& trade, const MechanismSpec& mechanism,
                         const MechanismConfig& cfg, int buyer_pool_size, int episode);

/// Emitted only when a bound fails.
struct ViolationReport {
  std::string invariant;
  int round = 0;
  int buyer_id = -1;
  int seller_id = -1;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Midpoint split: v_hat - p and p - a_hat both equal margin/2, margin > 0.
std::vector<ViolationReport> check_prop1(std::span<const AuditedTrade> trades);

/// U_S >= (1/2 - lambda) * margin for every deposit-regulated trade.
std::vector<ViolationReport> check_prop2(std::span<const AuditedTrade> trades, double lambda);

/// Deposit split and payment identities per trade; nonnegative platform
/// revenue per trade and per round.
std::vector<ViolationReport> check_budget(std::span<const AuditedTrade> trades);

/// sign(q(t+1) - q(t)) == sign(rho_bar(t) - q(t)) over a seller's history.
std::vector<ViolationReport> check_posture_sign(std::span<const PostureEntry> history,
                                                int seller_id = -1);

}  // namespace zebris
