#pragma once

#include <span>
#include <vector>

namespace zebris {

/// Mean refund ratio over a seller's trades this round, or its current
/// posture when it traded nothing.
double average_refund(std::span<const double> refund_ratios, double current_posture);

/// (1-omega)*q + omega*rho_bar.
double update_posture(double posture, double average_refund_ratio, double step);

struct PostureEntry {
  int round = 0;
  double posture = 0.0;         // q at the start of the round
  double average_refund = 0.0;  // rho_bar observed in the round
};

/// Per-seller posture state and its round-by-round history. Seller ids are
/// dense indices 0..n-1.
class PostureLedger {
 public:
  explicit PostureLedger(std::vector<double> initial);

  std::span<const double> postures() const { return postures_; }
  double posture(int seller_id) const { return postures_.at(static_cast<std::size_t>(seller_id)); }
  const std::vector<PostureEntry>& history(int seller_id) const {
    return history_.at(static_cast<std::size_t>(seller_id));
  }

  /// Records the round and applies every seller's update simultaneously.
  /// `refunds_by_seller[j]` holds the refund ratios of seller j's trades.
  /// With `dynamic` false the round is recorded but posture stays fixed.
  void apply_round(int round, const std::vector<std::vector<double>>& refunds_by_seller,
                   double step, bool dynamic = true);

 private:
  std::vector<double> postures_;
  std::vector<std::vector<PostureEntry>> history_;
};

}  // namespace zebris
