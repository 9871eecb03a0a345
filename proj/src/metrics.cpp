#include "zebris/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace zebris {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kSW: return "SW";
    case Metric::kATR: return "ATR";
    case Metric::kAED: return "AED";
    case Metric::kAPRC: return "APRC";
    case Metric::kACS: return "ACS";
    case Metric::kSU: return "SU";
    case Metric::kPlatformRevenue: return "PR";
  }
  return "?";
}

RoundMetrics compute_round_metrics(const ClearingOutcome& outcome,
                                   std::span<const TradeRecord> trades, int active_buyers) {
  if (trades.size() != outcome.accepted.size()) {
    throw std::logic_error("settlements do not match accepted trades");
  }
  RoundMetrics m;
  m.active = active_buyers;
  m.accepted = static_cast<int>(trades.size());
  m.accepted_trading_ratio =
      active_buyers > 0 ? static_cast<double>(m.accepted) / active_buyers : 0.0;
  double delay = 0.0, privacy = 0.0, compliance = 0.0, seller = 0.0;
  for (std::size_t k = 0; k < trades.size(); ++k) {
    const auto& t = trades[k];
    if (t.buyer_id != outcome.accepted[k].buyer_id || t.seller_id != outcome.accepted[k].seller_id) {
      throw std::logic_error("settlement order does not match accepted trades");
    }
    m.social_welfare += t.reference.margin;
    delay += t.measurement.realized_delay;
    privacy += t.privacy_penalty * t.reference.privacy_risk;
    compliance += t.settlement.refund_ratio;
    seller += t.settlement.seller_utility;
    m.platform_revenue += t.settlement.platform_cut;
  }
  if (!trades.empty()) {
    const double n = static_cast<double>(trades.size());
    m.avg_delay = delay / n;
    m.avg_privacy_cost = privacy / n;
    m.avg_compliance = compliance / n;
    m.avg_seller_utility = seller / n;
  }
  return m;
}

std::array<std::optional<double>, kAllMetrics.size()> summarize_episode(
    std::span<const RoundMetrics> rounds) {
  std::array<double, kAllMetrics.size()> sum{};
  std::array<int, kAllMetrics.size()> count{};
  auto add = [&](Metric m, std::optional<double> v) {
    if (!v) return;
    sum[static_cast<std::size_t>(m)] += *v;
    ++count[static_cast<std::size_t>(m)];
  };
  for (const auto& r : rounds) {
    add(Metric::kSW, r.social_welfare);
    add(Metric::kATR, r.accepted_trading_ratio);
    add(Metric::kAED, r.avg_delay);
    add(Metric::kAPRC, r.avg_privacy_cost);
    add(Metric::kACS, r.avg_compliance);
    add(Metric::kSU, r.avg_seller_utility);
    add(Metric::kPlatformRevenue, r.platform_revenue);
  }
  std::array<std::optional<double>, kAllMetrics.size()> out;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (count[k] > 0) out[k] = sum[k] / count[k];
  }
  return out;
}

SummaryStat summarize_values(std::span<const double> values) {
  SummaryStat s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / s.n;
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  s.half_width = 1.96 * s.sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

std::vector<SummaryRow> aggregate_episodes(std::span<const EpisodeSeries> episodes) {
  std::vector<std::string> mechanisms;
  for (const auto& e : episodes) {
    if (std::find(mechanisms.begin(), mechanisms.end(), e.mechanism) == mechanisms.end()) {
      mechanisms.push_back(e.mechanism);
    }
  }
  std::vector<SummaryRow> rows;
  for (const auto& mech : mechanisms) {
    std::map<int, std::vector<std::array<std::optional<double>, kAllMetrics.size()>>> by_pool;
    for (const auto& e : episodes) {
      if (e.mechanism == mech) by_pool[e.buyer_pool_size].push_back(summarize_episode(e.rounds));
    }
    for (const auto& [pool, per_episode] : by_pool) {
      for (Metric m : kAllMetrics) {
        std::vector<double> values;
        for (const auto& ep : per_episode) {
          if (const auto& v = ep[static_cast<std::size_t>(m)]) values.push_back(*v);
        }
        rows.push_back({mech, pool, m, summarize_values(values)});
      }
    }
  }
  return rows;
}

}  // namespace zebris
