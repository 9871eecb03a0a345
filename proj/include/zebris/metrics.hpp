#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zebris/clearing.hpp"
#include "zebris/mechanisms.hpp"

namespace zebris {

/// Averages over an empty accepted set are absent rather than zero.
struct RoundMetrics {
  double social_welfare = 0.0;          // SW, sum of accepted margins
  double accepted_trading_ratio = 0.0;  // ATR
  std::optional<double> avg_delay;          // AED, realized
  std::optional<double> avg_privacy_cost;   // APRC, beta * xi
  std::optional<double> avg_compliance;     // ACS, eta-weighted score
  std::optional<double> avg_seller_utility; // SU
  double platform_revenue = 0.0;
  int accepted = 0;
  int active = 0;
};

enum class Metric { kSW, kATR, kAED, kAPRC, kACS, kSU, kPlatformRevenue };
inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::kSW,  Metric::kATR, Metric::kAED,           Metric::kAPRC,
    Metric::kACS, Metric::kSU,  Metric::kPlatformRevenue};

std::string_view metric_name(Metric m);

/// Margins and privacy cost come from the full zero-trust valuation of each
/// traded package, so mechanisms that clear on partial valuations are
/// scored on the same footing. Throws std::logic_error when `trades` does
/// not match `outcome.accepted`.
RoundMetrics compute_round_metrics(const ClearingOutcome& outcome,
                                   std::span<const TradeRecord> trades, int active_buyers);

/// One episode's value of each metric: SW, ATR and platform revenue are
/// averaged over all rounds, the trade averages over rounds that had trades.
std::array<std::optional<double>, kAllMetrics.size()> summarize_episode(
    std::span<const RoundMetrics> rounds);

struct EpisodeSeries {
  std::string mechanism;
  int buyer_pool_size = 0;
  int episode = 0;
  std::vector<RoundMetrics> rounds;
};

struct SummaryStat {
  double mean = 0.0;
  double sd = 0.0;          // sample standard deviation, 0 when n < 2
  double half_width = 0.0;  // 1.96 * sd / sqrt(n)
  int n = 0;                // episodes with a defined value
};

struct SummaryRow {
  std::string mechanism;
  int buyer_pool_size = 0;
  Metric metric = Metric::kSW;
  SummaryStat stat{};
};

SummaryStat summarize_values(std::span<const double> values);

/// Rows keyed by (mechanism, buyer-pool size, metric); mechanisms in order of
/// first appearance, pool sizes ascending, metrics in kAllMetrics order.
std::vector<SummaryRow> aggregate_episodes(std::span<const EpisodeSeries> episodes);

}  // namespace zebris
