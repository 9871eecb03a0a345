#include "zebris/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "zebris/errors.hpp"

namespace zebris {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_range(const Range& r, const std::string& name, double min_lo, bool open_lo,
                   double max_hi) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo < r.hi,
          name + " must be a non-degenerate interval [lo, hi] with lo < hi");
  require(open_lo ? r.lo > min_lo : r.lo >= min_lo, name + " lower bound out of domain");
  require(r.hi <= max_hi, name + " upper bound out of domain");
}

bool strictly_ascending_unit(const std::vector<double>& z) {
  if (z.empty()) return false;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!in_unit(z[k])) return false;
    if (k > 0 && !(z[k] > z[k - 1])) return false;
  }
  return true;
}

}  // namespace

bool BuyerRequest::satisfies_invariants() const {
  return data_size_mb > 0.0 && workload_gcycles > 0.0 && deadline_s > 0.0 &&
         gross_valuation > 0.0 && delay_penalty > 0.0 && privacy_penalty > 0.0 &&
         in_unit(privacy_sensitivity) && in_unit(min_security);
}

bool SellerState::satisfies_invariants() const {
  return bandwidth_mhz > 0.0 && compute_gcps > 0.0 && base_ask >= 0.0 &&
         unit_bandwidth_cost > 0.0 && unit_compute_cost > 0.0 && in_unit(posture) &&
         strictly_ascending_unit(verification_levels);
}

ChannelState::ChannelState(int buyer_slots, int num_sellers)
    : buyer_slots_(buyer_slots),
      num_sellers_(num_sellers),
      sinr_(static_cast<std::size_t>(buyer_slots) * static_cast<std::size_t>(num_sellers), 0.0) {}

double ChannelState::sinr(int buyer_id, int seller_id) const {
  if (buyer_id < 0 || buyer_id >= buyer_slots_ || seller_id < 0 || seller_id >= num_sellers_) {
    throw DomainError("no channel entry for pair (" + std::to_string(buyer_id) + ", " +
                      std::to_string(seller_id) + ")");
  }
  const double s = sinr_[static_cast<std::size_t>(buyer_id) * num_sellers_ + seller_id];
  if (!(s > 0.0)) {
    throw DomainError("pair (" + std::to_string(buyer_id) + ", " + std::to_string(seller_id) +
                      ") has no positive SINR");
  }
  return s;
}

void ChannelState::set_sinr(int buyer_id, int seller_id, double linear) {
  if (buyer_id < 0 || buyer_id >= buyer_slots_ || seller_id < 0 || seller_id >= num_sellers_) {
    throw DomainError("channel index out of range");
  }
  if (!(linear > 0.0)) throw DomainError("SINR must be positive");
  sinr_[static_cast<std::size_t>(buyer_id) * num_sellers_ + seller_id] = linear;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void ScenarioConfig::validate() const {
  require(num_sellers >= 1, "num_sellers must be >= 1 (empty seller list)");
  require(horizon >= 1, "horizon must be >= 1");
  require(buyer_pool_size >= 0, "buyer_pool_size must be >= 0");
  if (activation_profile.empty()) {
    require(in_unit(activation_probability), "activation_probability must lie in [0,1]");
  } else {
    require(static_cast<int>(activation_profile.size()) >= buyer_pool_size,
            "activation profile has " + std::to_string(activation_profile.size()) +
                " entries but the buyer pool has " + std::to_string(buyer_pool_size));
    for (double p : activation_profile) {
      require(in_unit(p), "activation profile probabilities must lie in [0,1]");
    }
  }

  const auto& b = buyers;
  require_range(b.data_size_mb, "buyers.data_size_mb", 0.0, true, INFINITY);
  require_range(b.workload_gcycles, "buyers.workload_gcycles", 0.0, true, INFINITY);
  require_range(b.deadline_s, "buyers.deadline_s", 0.0, true, INFINITY);
  require_range(b.privacy_sensitivity, "buyers.privacy_sensitivity", 0.0, false, 1.0);
  require_range(b.min_security, "buyers.min_security", 0.0, false, 1.0);
  require_range(b.gross_valuation, "buyers.gross_valuation", 0.0, true, INFINITY);
  require_range(b.delay_penalty, "buyers.delay_penalty", 0.0, true, INFINITY);
  require_range(b.privacy_penalty, "buyers.privacy_penalty", 0.0, true, INFINITY);

  const auto& s = sellers;
  require_range(s.bandwidth_mhz, "sellers.bandwidth_mhz", 0.0, true, INFINITY);
  require_range(s.compute_gcps, "sellers.compute_gcps", 0.0, true, INFINITY);
  require_range(s.initial_posture, "sellers.initial_posture", 0.0, false, 1.0);
  require_range(s.base_ask, "sellers.base_ask", 0.0, false, INFINITY);
  require_range(s.unit_bandwidth_cost, "sellers.unit_bandwidth_cost", 0.0, true, INFINITY);
  require_range(s.unit_compute_cost, "sellers.unit_compute_cost", 0.0, true, INFINITY);
  require(strictly_ascending_unit(s.verification_levels),
          "sellers.verification_levels must be non-empty, strictly ascending, within [0,1]");

  require(std::isfinite(sinr_db.lo) && std::isfinite(sinr_db.hi) && sinr_db.lo < sinr_db.hi,
          "sinr_db must be a non-degenerate interval");
  require(package_grid.bandwidth_levels >= 1 && package_grid.compute_levels >= 1 &&
              package_grid.verification_levels >= 1,
          "package_grid counts must be >= 1");
  require(package_grid.verification_levels <= static_cast<int>(s.verification_levels.size()),
          "package_grid.verification_levels cannot exceed the number of verification levels");

  mechanism.validate();
  effort.validate();
  clearing.validate();
}

double ScenarioConfig::activation_of(int buyer_id) const {
  if (activation_profile.empty()) return activation_probability;
  return activation_profile.at(static_cast<std::size_t>(buyer_id));
}

double snap_to_lattice(double value, double step, const Range& range) {
  const double lo = std::ceil(range.lo / step - 1e-9);
  const double hi = std::floor(range.hi / step + 1e-9);
  if (lo > hi) return value;
  return std::clamp(std::round(value / step), lo, hi) * step;
}

std::vector<SellerProfile> sample_seller_profiles(const ScenarioConfig& scenario, Rng& rng) {
  std::vector<SellerProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(scenario.num_sellers));
  for (int j = 0; j < scenario.num_sellers; ++j) {
    SellerProfile p;
    p.seller_id = j;
    p.initial_posture = scenario.sellers.initial_posture.sample(rng);
    p.base_ask = scenario.sellers.base_ask.sample(rng);
    p.unit_bandwidth_cost = scenario.sellers.unit_bandwidth_cost.sample(rng);
    p.unit_compute_cost = scenario.sellers.unit_compute_cost.sample(rng);
    profiles.push_back(p);
  }
  return profiles;
}

RoundInputs sample_round(const ScenarioConfig& scenario, Rng& rng, int round_index,
                         std::span<const SellerProfile> profiles,
                         std::span<const double> postures) {
  if (scenario.num_sellers < 1 || profiles.empty()) {
    throw ConfigError("round generation needs at least one seller");
  }
  if (round_index < 0 || round_index >= scenario.horizon) {
    throw ConfigError("round index " + std::to_string(round_index) + " outside horizon " +
                      std::to_string(scenario.horizon));
  }
  if (profiles.size() != postures.size() ||
      static_cast<int>(profiles.size()) != scenario.num_sellers) {
    throw ConfigError("seller profiles and postures must both cover num_sellers");
  }

  RoundInputs in;
  in.round_index = round_index;

  // Activation draws are consumed for every pool buyer so the stream
  // position does not depend on which buyers turned out active.
  std::vector<int> active;
  for (int i = 0; i < scenario.buyer_pool_size; ++i) {
    if (rng.bernoulli(scenario.activation_of(i))) active.push_back(i);
  }

  const auto& br = scenario.buyers;
  in.buyers.reserve(active.size());
  for (int id : active) {
    BuyerRequest b;
    b.buyer_id = id;
    b.data_size_mb = br.data_size_mb.sample(rng);
    b.workload_gcycles = br.workload_gcycles.sample(rng);
    b.deadline_s = br.deadline_s.sample(rng);
    b.privacy_sensitivity = br.privacy_sensitivity.sample(rng);
    b.min_security = br.min_security.sample(rng);
    b.gross_valuation = br.gross_valuation.sample(rng);
    b.delay_penalty = br.delay_penalty.sample(rng);
    b.privacy_penalty = br.privacy_penalty.sample(rng);
    in.buyers.push_back(b);
  }

  const auto& sr = scenario.sellers;
  in.sellers.reserve(profiles.size());
  for (std::size_t j = 0; j < profiles.size(); ++j) {
    SellerState s;
    s.seller_id = profiles[j].seller_id;
    s.bandwidth_mhz = sr.bandwidth_mhz.sample(rng);
    s.compute_gcps = sr.compute_gcps.sample(rng);
    if (scenario.snap_capacity_to_grid) {
      const auto& q = scenario.clearing.quantum;
      const auto& g = scenario.package_grid;
      s.bandwidth_mhz = snap_to_lattice(s.bandwidth_mhz, g.bandwidth_levels * q.bandwidth,
                                        sr.bandwidth_mhz);
      s.compute_gcps = snap_to_lattice(s.compute_gcps, g.compute_levels * q.compute,
                                       sr.compute_gcps);
    }
    const double ask_draw = sr.base_ask.sample(rng);
    s.base_ask = scenario.resample_base_ask ? ask_draw : profiles[j].base_ask;
    s.posture = postures[j];
    s.verification_levels = sr.verification_levels;
    s.unit_bandwidth_cost = profiles[j].unit_bandwidth_cost;
    s.unit_compute_cost = profiles[j].unit_compute_cost;
    in.sellers.push_back(std::move(s));
  }

  in.channel = ChannelState(scenario.buyer_pool_size, scenario.num_sellers);
  for (const auto& b : in.buyers) {
    for (const auto& s : in.sellers) {
      in.channel.set_sinr(b.buyer_id, s.seller_id, db_to_linear(scenario.sinr_db.sample(rng)));
    }
  }
  return in;
}

std::vector<Package> enumerate_candidates(const BuyerRequest& /*buyer*/, const SellerState& seller,
                                          const ScenarioConfig& scenario) {
  const auto& grid = scenario.package_grid;
  const auto& z = seller.verification_levels;
  const int nz = std::min(grid.verification_levels, static_cast<int>(z.size()));

  // Level k of n picks index ceil(k*|Z|/n)-1, so n=|Z| takes every level and
  // n=1 takes the strongest one.
  std::vector<double> z_levels;
  z_levels.reserve(static_cast<std::size_t>(nz));
  for (int k = 1; k <= nz; ++k) {
    const std::size_t idx = (static_cast<std::size_t>(k) * z.size() + nz - 1) / nz - 1;
    z_levels.push_back(z[idx]);
  }

  std::vector<Package> out;
  out.reserve(static_cast<std::size_t>(grid.bandwidth_levels) * grid.compute_levels * nz);
  for (int kb = 1; kb <= grid.bandwidth_levels; ++kb) {
    const double b = kb == grid.bandwidth_levels
                         ? seller.bandwidth_mhz
                         : seller.bandwidth_mhz * kb / grid.bandwidth_levels;
    for (int kf = 1; kf <= grid.compute_levels; ++kf) {
      const double f = kf == grid.compute_levels ? seller.compute_gcps
                                                 : seller.compute_gcps * kf / grid.compute_levels;
      for (double zl : z_levels) out.push_back(Package{b, f, zl});
    }
  }
  return out;
}

std::vector<double> load_activation_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open activation profile: " + path.string());
  std::vector<double> probs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line.substr(first));
    double p = 0.0;
    if (!(fields >> p) || !in_unit(p)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected a probability in [0,1]");
    }
    probs.push_back(p);
  }
  return probs;
}

}  // namespace zebris
