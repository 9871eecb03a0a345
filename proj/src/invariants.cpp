#include "zebris/invariants.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace zebris {

namespace {

ViolationReport report(std::string name, const AuditedTrade& t, double observed, double bound,
                       std::string detail) {
  return ViolationReport{std::move(name), t.round,  t.buyer_id, t.seller_id,
                         observed,        bound,    std::move(detail)};
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

AuditedTrade audit_trade(const TradeRecord& trade, const MechanismSpec& mechanism,
                         const MechanismConfig& cfg, int buyer_pool_size, int episode) {
  AuditedTrade a;
  a.mechanism = mechanism.name;
  a.buyer_pool_size = buyer_pool_size;
  a.episode = episode;
  a.round = trade.round;
  a.buyer_id = trade.buyer_id;
  a.seller_id = trade.seller_id;
  a.margin = trade.cleared.margin;
  a.effective_valuation = trade.cleared.effective_valuation;
  a.effective_ask = trade.cleared.effective_ask;
  a.deposit_enabled = mechanism.deposit_enabled;
  a.deposit_cap_ratio = cfg.deposit_cap_ratio;
  a.settlement = trade.settlement;
  return a;
}

std::vector<ViolationReport> check_prop1(std::span<const AuditedTrade> trades) {
  std::vector<ViolationReport> out;
  for (const auto& t : trades) {
    const double half = t.margin / 2.0;
    const double buyer_pre = t.effective_valuation - t.settlement.price;
    const double seller_pre = t.settlement.price - t.effective_ask;
    if (!(t.margin > 0.0)) {
      out.push_back(report("prop1", t, t.margin, 0.0, "accepted trade without positive margin"));
    }
    if (std::abs(buyer_pre - half) > kInvariantTolerance) {
      out.push_back(report("prop1", t, buyer_pre, half, "buyer pre-settlement utility != margin/2"));
    }
    if (std::abs(seller_pre - half) > kInvariantTolerance) {
      out.push_back(
          report("prop1", t, seller_pre, half, "seller pre-settlement utility != margin/2"));
    }
  }
  return out;
}

std::vector<ViolationReport> check_prop2(std::span<const AuditedTrade> trades, double lambda) {
  std::vector<ViolationReport> out;
  for (const auto& t : trades) {
    if (!t.deposit_enabled) continue;
    const double bound = (0.5 - lambda) * t.margin;
    if (t.settlement.seller_utility < bound - kInvariantTolerance) {
      out.push_back(report("prop2", t, t.settlement.seller_utility, bound,
                           "seller utility below (1/2 - lambda) * margin"));
    }
    if (!(t.settlement.seller_utility > 0.0)) {
      out.push_back(report("prop2", t, t.settlement.seller_utility, 0.0,
                           "seller utility not strictly positive"));
    }
  }
  return out;
}

std::vector<ViolationReport> check_budget(std::span<const AuditedTrade> trades) {
  std::vector<ViolationReport> out;
  using RoundKey = std::tuple<std::string, int, int, int>;
  std::map<RoundKey, std::pair<double, const AuditedTrade*>> per_round;
  for (const auto& t : trades) {
    const auto& s = t.settlement;
    if (s.platform_cut < -kInvariantTolerance) {
      out.push_back(report("budget", t, s.platform_cut, 0.0, "negative platform revenue"));
    }
    if (std::abs(s.refunded + s.forfeited - s.deposit) > kInvariantTolerance) {
      out.push_back(report("budget", t, s.refunded + s.forfeited, s.deposit,
                           "refunded + forfeited != deposit"));
    }
    if (std::abs(s.buyer_compensation + s.platform_cut - s.forfeited) > kInvariantTolerance) {
      out.push_back(report("budget", t, s.buyer_compensation + s.platform_cut, s.forfeited,
                           "compensation + platform cut != forfeited"));
    }
    const double accounted = (s.price - s.forfeited) + s.buyer_compensation + s.platform_cut;
    if (std::abs(accounted - s.price) > kInvariantTolerance) {
      out.push_back(report("budget", t, accounted, s.price, "buyer payment not fully accounted"));
    }
    auto& slot = per_round[{t.mechanism, t.buyer_pool_size, t.episode, t.round}];
    slot.first += s.platform_cut;
    slot.second = &t;
  }
  for (const auto& [key, entry] : per_round) {
    if (entry.first < -kInvariantTolerance) {
      auto r = report("budget", *entry.second, entry.first, 0.0, "negative round platform revenue");
      r.buyer_id = -1;
      r.seller_id = -1;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<ViolationReport> check_posture_sign(std::span<const PostureEntry> history,
                                                int seller_id) {
  std::vector<ViolationReport> out;
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    const double q = history[k].posture;
    const double next = history[k + 1].posture;
    const double rho_bar = history[k].average_refund;
    if (sign(next - q) != sign(rho_bar - q)) {
      out.push_back(ViolationReport{"prop3", history[k].round, -1, seller_id, next - q, rho_bar - q,
                                    "posture moved against the refund signal"});
    }
  }
  return out;
}

}  // namespace zebris
