#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "zebris/params.hpp"
#include "zebris/rng.hpp"

namespace zebris {

/// One active buyer's request for a round plus its penalty coefficients.
struct BuyerRequest {
  int buyer_id = 0;
  double data_size_mb = 0.0;         // L
  double workload_gcycles = 0.0;     // C
  double deadline_s = 0.0;           // D_max
  double privacy_sensitivity = 0.0;  // l, in [0,1]
  double min_security = 0.0;         // s_min, in [0,1]
  double gross_valuation = 0.0;      // v
  double delay_penalty = 0.0;        // alpha, per second
  double privacy_penalty = 0.0;      // beta, per risk unit

  bool satisfies_invariants() const;
};

/// A seller's capacities, posture and cost coefficients for one round.
struct SellerState {
  int seller_id = 0;
  double bandwidth_mhz = 0.0;   // B
  double compute_gcps = 0.0;    // F
  double posture = 0.0;         // q
  std::vector<double> verification_levels;  // Z, strictly ascending in [0,1]
  double base_ask = 0.0;             // a
  double unit_bandwidth_cost = 0.0;  // kappa_B
  double unit_compute_cost = 0.0;    // kappa_F

  bool satisfies_invariants() const;
};

/// Bandwidth (MHz), compute (giga-cycles/s) and verification intensity.
struct Package {
  double bandwidth = 0.0;
  double compute = 0.0;
  double verification = 0.0;

  friend bool operator==(const Package&, const Package&) = default;
};

/// Per-pair linear SINR for the active buyers of a round.
class ChannelState {
 public:
  ChannelState() = default;
  ChannelState(int buyer_slots, int num_sellers);

  /// Throws DomainError when the pair was never assigned a positive SINR.
  double sinr(int buyer_id, int seller_id) const;
  void set_sinr(int buyer_id, int seller_id, double linear);
  int num_sellers() const { return num_sellers_; }

 private:
  int buyer_slots_ = 0;
  int num_sellers_ = 0;
  std::vector<double> sinr_;
};

/// Closed interval used for uniform sampling.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(Rng& rng) const { return rng.uniform(lo, hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct BuyerRanges {
  Range data_size_mb{0.15, 0.95};
  Range workload_gcycles{0.10, 1.00};
  Range deadline_s{0.25, 0.90};
  Range privacy_sensitivity{0.20, 1.00};
  Range min_security{0.40, 0.90};
  Range gross_valuation{8.0, 20.0};
  Range delay_penalty{3.0, 6.0};
  Range privacy_penalty{2.0, 5.0};
};

struct SellerRanges {
  Range bandwidth_mhz{6.0, 10.0};
  Range compute_gcps{18.0, 32.0};
  Range initial_posture{0.50, 0.92};
  Range base_ask{2.0, 6.0};
  Range unit_bandwidth_cost{0.08, 0.18};
  Range unit_compute_cost{0.10, 0.22};
  std::vector<double> verification_levels{0.3, 0.6, 0.9};
};

/// Grid resolution of the candidate packages offered to every pair.
struct PackageGrid {
  int bandwidth_levels = 4;
  int compute_levels = 4;
  int verification_levels = 3;
};

/// Nearest multiple of `step` inside `range`; `value` itself when the range
/// holds no multiple.
double snap_to_lattice(double value, double step, const Range& range);

/// Everything needed to generate and clear a market episode.
struct ScenarioConfig {
  int num_sellers = 6;
  int horizon = 180;
  int buyer_pool_size = 20;
  /// Used for every pool buyer when `activation_profile` is empty.
  double activation_probability = 0.5;
  /// Per-buyer Bernoulli activation probabilities, indexed by buyer id.
  std::vector<double> activation_profile;
  BuyerRanges buyers{};
  SellerRanges sellers{};
  Range sinr_db{5.0, 25.0};
  PackageGrid package_grid{};
  /// When false, the base ask is drawn once per seller per episode.
  bool resample_base_ask = true;
  /// Rounds sampled capacities to multiples of (grid levels x quantum) so
  /// every package in the grid lands exactly on the quantization lattice.
  bool snap_capacity_to_grid = true;
  std::uint64_t rng_seed = 42;

  MechanismConfig mechanism{};
  EffortModel effort{};
  ClearingOptions clearing{};

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  double activation_of(int buyer_id) const;
};

/// Seller attributes fixed for a whole episode.
struct SellerProfile {
  int seller_id = 0;
  double initial_posture = 0.0;
  double base_ask = 0.0;
  double unit_bandwidth_cost = 0.0;
  double unit_compute_cost = 0.0;
};

struct RoundInputs {
  int round_index = 0;
  std::vector<BuyerRequest> buyers;  // active buyers, ascending id
  std::vector<SellerState> sellers;  // ascending id
  ChannelState channel;
};

/// Draws the episode-level seller profiles (initial posture, unit costs and,
/// when asks are fixed, the base ask).
std::vector<SellerProfile> sample_seller_profiles(const ScenarioConfig& scenario, Rng& rng);

/// Generates one round. Posture for each seller comes from `postures`
/// (indexed by seller id) rather than the stream.
RoundInputs sample_round(const ScenarioConfig& scenario, Rng& rng, int round_index,
                         std::span<const SellerProfile> profiles,
                         std::span<const double> postures);

/// Evenly spaced candidate grid: bandwidth k*B/n, compute k*F/m, and
/// `verification_levels` entries of Z (all of Z when the count equals |Z|).
std::vector<Package> enumerate_candidates(const BuyerRequest& buyer, const SellerState& seller,
                                          const ScenarioConfig& scenario);

/// One probability per line; blank lines and `#` comments are skipped.
std::vector<double> load_activation_profile(const std::filesystem::path& path);

double db_to_linear(double db);

}  // namespace zebris
