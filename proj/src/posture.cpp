#include "zebris/posture.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace zebris {

double average_refund(std::span<const double> refund_ratios, double current_posture) {
  if (refund_ratios.empty()) return current_posture;
  const double sum = std::accumulate(refund_ratios.begin(), refund_ratios.end(), 0.0);
  return sum / static_cast<double>(refund_ratios.size());
}

double update_posture(double posture, double average_refund_ratio, double step) {
  const double next = (1.0 - step) * posture + step * average_refund_ratio;
  // Keep the convex combination inside its endpoints despite rounding.
  return std::clamp(next, std::min(posture, average_refund_ratio),
                    std::max(posture, average_refund_ratio));
}

PostureLedger::PostureLedger(std::vector<double> initial)
    : postures_(std::move(initial)), history_(postures_.size()) {
  for (double q : postures_) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("posture must lie in [0,1]");
  }
}

void PostureLedger::apply_round(int round, const std::vector<std::vector<double>>& refunds_by_seller,
                                double step, bool dynamic) {
  if (refunds_by_seller.size() != postures_.size()) {
    throw std::invalid_argument("refund lists must cover every seller");
  }
  std::vector<double> next(postures_.size());
  for (std::size_t j = 0; j < postures_.size(); ++j) {
    const double rho_bar = average_refund(refunds_by_seller[j], postures_[j]);
    history_[j].push_back({round, postures_[j], rho_bar});
    next[j] = dynamic ? update_posture(postures_[j], rho_bar, step) : postures_[j];
  }
  postures_ = std::move(next);
}

}  // namespace zebris
