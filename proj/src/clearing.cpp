#include "zebris/clearing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <unordered_map>

#include "zebris/errors.hpp"

namespace zebris {

namespace {

constexpr double kGridSnap = 1e-9;
constexpr double kCapacitySlack = 1e-9;

// Two candidate totals closer than this are treated as a tie.
double tie_tolerance(double reference) { return 1e-12 * std::max(1.0, std::abs(reference)); }

int slot_of(std::span<const SellerCapacity> sellers, int seller_id) {
  for (std::size_t k = 0; k < sellers.size(); ++k) {
    if (sellers[k].seller_id == seller_id) return static_cast<int>(k);
  }
  return -1;
}

ClearingOutcome finalize(std::vector<CandidatePair> accepted,
                         std::span<const SellerCapacity> sellers) {
  std::sort(accepted.begin(), accepted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.buyer_id, a.seller_id) < std::tie(b.buyer_id, b.seller_id);
  });
  ClearingOutcome out;
  out.residual.assign(sellers.begin(), sellers.end());
  for (const auto& p : accepted) {
    out.welfare += p.evaluation.margin;
    const int slot = slot_of(sellers, p.seller_id);
    out.residual[static_cast<std::size_t>(slot)].bandwidth -= p.evaluation.package.bandwidth;
    out.residual[static_cast<std::size_t>(slot)].compute -= p.evaluation.package.compute;
  }
  out.accepted = std::move(accepted);
  return out;
}

// Pairs of the quantized instance grouped by buyer, options in seller order.
struct BuyerGroup {
  int buyer_id = 0;
  std::vector<std::size_t> pairs;
};

std::vector<BuyerGroup> group_by_buyer(const QuantizedInstance& inst) {
  std::vector<BuyerGroup> groups;
  for (std::size_t k = 0; k < inst.pairs.size(); ++k) {
    const int b = inst.pairs[k].buyer_id;
    if (groups.empty() || groups.back().buyer_id != b) groups.push_back({b, {}});
    groups.back().pairs.push_back(k);
  }
  for (auto& g : groups) {
    std::sort(g.pairs.begin(), g.pairs.end(), [&](std::size_t a, std::size_t b) {
      return inst.seller_slot[a] < inst.seller_slot[b];
    });
  }
  return groups;
}

// Picks the option by the shared tie rule: skip if it reaches the maximum,
// otherwise the first (lowest seller) option that does. -1 means skip.
int choose(double skip_value, const std::vector<double>& option_values) {
  double best = skip_value;
  for (double v : option_values) best = std::max(best, v);
  const double tol = tie_tolerance(best);
  if (skip_value >= best - tol) return -1;
  for (std::size_t k = 0; k < option_values.size(); ++k) {
    if (option_values[k] >= best - tol) return static_cast<int>(k);
  }
  return -1;
}

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

using Residual = std::vector<std::uint16_t>;  // [b0, f0, b1, f1, ...]

struct ResidualHash {
  std::size_t operator()(const Residual& r) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : r) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct PackedHash {
  std::size_t operator()(std::uint64_t k) const noexcept {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

// Memoized branch-and-bound over reachable residual vectors. Residuals are
// clamped to what the remaining buyers could still consume, so states with
// identical futures share one memo entry; each entry keeps proven lower and
// upper bounds on the optimal welfare from that state. The optimum is found
// with an incumbent search, then the assignment is rebuilt one buyer at a
// time with threshold queries that apply the same tie rule as the table DP.
template <class Key, class Hash>
class SearchSolver {
 public:
  // Buyers listed in `must_assign` may not be skipped.
  SearchSolver(const QuantizedInstance& inst, const std::vector<BuyerGroup>& groups,
               std::size_t state_cap, const std::vector<int>& must_assign = {})
      : inst_(inst), groups_(groups), cap_(state_cap), memo_(groups.size()) {
    must_.assign(groups.size() + 1, 0);
    must_after_.assign(groups.size() + 1, 0);
    for (std::size_t k = groups.size(); k-- > 0;) {
      must_[k] = std::binary_search(must_assign.begin(), must_assign.end(), groups[k].buyer_id);
      must_after_[k] = must_after_[k + 1] + must_[k];
    }
    const std::size_t dims = 2 * inst.sellers.size();
    suffix_.assign(groups.size() + 1, std::vector<int>(dims, 0));
    for (std::size_t k = groups.size(); k-- > 0;) {
      suffix_[k] = suffix_[k + 1];
      // A buyer takes at most one option, so its contribution is the max.
      std::vector<int> most(dims, 0);
      for (std::size_t p : groups[k].pairs) {
        const auto slot = static_cast<std::size_t>(inst.seller_slot[p]);
        most[2 * slot] = std::max(most[2 * slot], inst.bandwidth_demand[p]);
        most[2 * slot + 1] = std::max(most[2 * slot + 1], inst.compute_demand[p]);
      }
      for (std::size_t d = 0; d < dims; ++d) suffix_[k][d] += most[d];
    }
    order_.resize(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
      order_[k] = groups[k].pairs;
      std::stable_sort(order_[k].begin(), order_[k].end(), [&](std::size_t a, std::size_t b) {
        return inst.pairs[a].evaluation.margin > inst.pairs[b].evaluation.margin;
      });
    }
    layer_of_.assign(inst.pairs.size(), 0);
    for (std::size_t k = 0; k < groups.size(); ++k) {
      for (std::size_t p : groups[k].pairs) layer_of_[p] = k;
    }
    build_units();
    build_density_lists();
    fit_prices();
    fit_buyer_prices();
    stride_.resize(dims);
    std::uint64_t s = 1;
    for (std::size_t j = 0; j < inst.sellers.size(); ++j) {
      stride_[2 * j] = s;
      s *= static_cast<std::uint64_t>(inst.bandwidth_capacity[j]) + 1;
      stride_[2 * j + 1] = s;
      s *= static_cast<std::uint64_t>(inst.compute_capacity[j]) + 1;
    }
  }

  std::vector<CandidatePair> solve(const Residual& initial) {
    Residual r = canonical(0, initial);
    explore(0, r, 0.0);
    double remaining = incumbent_;
    std::vector<CandidatePair> accepted;
    for (std::size_t layer = 0; layer < groups_.size(); ++layer) {
      const double target = remaining - tie_tolerance(remaining);
      if (must_[layer] || !reach(layer + 1, canonical(layer + 1, r), target)) {
        bool placed = false;
        for (std::size_t p : groups_[layer].pairs) {
          if (!fits(r, p)) continue;
          const double m = inst_.pairs[p].evaluation.margin;
          if (reach(layer + 1, canonical(layer + 1, consume(r, p)), target - m)) {
            accepted.push_back(inst_.pairs[p]);
            r = consume(r, p);
            remaining -= m;
            placed = true;
            break;
          }
        }
        if (!placed) throw std::logic_error("clearing search lost the optimal assignment");
      }
      r = canonical(layer + 1, r);
    }
    return accepted;
  }

  // Best welfare among local-search improvements of two starts: a greedy
  // assignment and the repaired per-seller picks of the buyer-price bound.
  double warm_incumbent(const Residual& initial) {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> start(groups_.size(), kNone);
    incumbent_ = std::max(incumbent_, improve(initial, start));

    std::vector<double> price = buyer_prices_.empty() ? std::vector<double>{} : buyer_prices_[0];
    if (price.empty()) return incumbent_;
    const Residual r = canonical(0, initial);
    tune(0, r, incumbent_, kFixingIterations, price);
    std::fill(start.begin(), start.end(), kNone);
    for (std::size_t j = 0; j < inst_.sellers.size(); ++j) {
      std::vector<std::size_t> picks;
      const double v = seller_knapsack(j, 0, r[2 * j] / unit_b_[j], r[2 * j + 1] / unit_f_[j],
                                       price, groups_.size(), nullptr, &picks);
      if (!std::isfinite(v)) return incumbent_;
      for (std::size_t p : picks) {
        const std::size_t k = layer_of_[p];
        if (start[k] == kNone ||
            inst_.pairs[p].evaluation.margin > inst_.pairs[start[k]].evaluation.margin) {
          start[k] = p;
        }
      }
    }
    // A buyer kept on one seller frees its slot elsewhere, so every seller's
    // kept subset still fits.
    incumbent_ = std::max(incumbent_, improve(initial, start));
    return incumbent_;
  }

  // Completes `start` (pair per layer or none; must fit) greedily, then
  // applies local search: insert or move a buyer, possibly ejecting one
  // buyer from the target seller and relocating it. Only strict
  // improvements are taken, so it terminates.
  double improve(const Residual& initial, std::vector<std::size_t> assigned) {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    const std::size_t layers = groups_.size();
    std::vector<int> res(initial.begin(), initial.end());
    std::vector<std::vector<std::size_t>> on_seller(inst_.sellers.size());  // layers
    auto slot = [&](std::size_t p) { return static_cast<std::size_t>(inst_.seller_slot[p]); };
    auto margin = [&](std::size_t p) { return p == kNone ? 0.0 : inst_.pairs[p].evaluation.margin; };
    auto room = [&](std::size_t p, std::size_t freed_a, std::size_t freed_b) {
      const std::size_t j = slot(p);
      int b = res[2 * j], f = res[2 * j + 1];
      for (std::size_t q : {freed_a, freed_b}) {
        if (q != kNone && slot(q) == j) {
          b += inst_.bandwidth_demand[q];
          f += inst_.compute_demand[q];
        }
      }
      return b >= inst_.bandwidth_demand[p] && f >= inst_.compute_demand[p];
    };
    auto take = [&](std::size_t k, std::size_t p, int sign) {
      const std::size_t j = slot(p);
      res[2 * j] -= sign * inst_.bandwidth_demand[p];
      res[2 * j + 1] -= sign * inst_.compute_demand[p];
      auto& list = on_seller[j];
      if (sign > 0) {
        list.push_back(k);
      } else {
        list.erase(std::find(list.begin(), list.end(), k));
      }
    };
    auto set = [&](std::size_t k, std::size_t p) {
      if (assigned[k] != kNone) take(k, assigned[k], -1);
      assigned[k] = p;
      if (p != kNone) take(k, p, +1);
    };

    for (std::size_t k = 0; k < layers; ++k) {
      const std::size_t p = assigned[k];
      assigned[k] = kNone;
      if (p != kNone) set(k, p);
    }
    // Greedy completion: buyers by best margin, each to its best fitting seller.
    std::vector<std::size_t> ks(layers);
    std::iota(ks.begin(), ks.end(), std::size_t{0});
    std::stable_sort(ks.begin(), ks.end(), [&](std::size_t a, std::size_t b) {
      return margin(order_[a].front()) > margin(order_[b].front());
    });
    for (std::size_t k : ks) {
      if (assigned[k] != kNone) continue;
      for (std::size_t p : order_[k]) {
        if (room(p, kNone, kNone)) {
          set(k, p);
          break;
        }
      }
    }

    const double eps = 1e-12;
    for (int pass = 0; pass < kLocalSearchPasses; ++pass) {
      bool improved = false;
      for (std::size_t k = 0; k < layers; ++k) {
        const std::size_t cur = assigned[k];
        for (std::size_t p : order_[k]) {
          if (p == cur) continue;
          const double base = margin(p) - margin(cur);
          if (room(p, cur, kNone)) {
            if (base > eps) {
              set(k, p);
              improved = true;
              break;
            }
            continue;
          }
          // Eject one buyer from p's seller and relocate it if possible.
          bool moved = false;
          for (std::size_t k2 : std::vector<std::size_t>(on_seller[slot(p)])) {
            if (k2 == k) continue;
            const std::size_t q = assigned[k2];
            if (!room(p, cur, q)) continue;
            double back = 0.0;
            std::size_t to = kNone;
            for (std::size_t q2 : order_[k2]) {
              if (q2 == q || slot(q2) == slot(p)) continue;
              if (room(q2, cur, kNone)) {
                back = margin(q2);
                to = q2;
                break;
              }
            }
            if (base - margin(q) + back > eps) {
              set(k2, kNone);
              set(k, p);
              if (to != kNone && room(to, kNone, kNone)) set(k2, to);
              moved = improved = true;
              break;
            }
          }
          if (moved) break;
        }
      }
      if (!improved) break;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < layers; ++k) total += margin(assigned[k]);
    return total;
  }

  void seed_incumbent(double value) { incumbent_ = std::max(incumbent_, value); }

  // Marks pairs that can still appear in a solution within the tie
  // tolerance of the optimum, given a feasible welfare `incumbent`. A pair
  // is dropped when the buyer-price bound with that pair forced in falls
  // short of the incumbent.
  struct Fixing {
    std::vector<bool> keep;        // per pair
    std::vector<int> must_assign;  // buyer ids, ascending
  };

  Fixing viable_pairs(const Residual& initial, double incumbent) const {
    Fixing out{std::vector<bool>(inst_.pairs.size(), true), {}};
    auto& keep = out.keep;
    if (groups_.empty()) return out;
    const Residual r = canonical(0, initial);
    std::vector<double> price = buyer_prices_[0];
    tune(0, r, incumbent, kFixingIterations, price);
    const double cutoff = incumbent - tie_tolerance(incumbent) - slack(incumbent);
    double priced_total = 0.0;
    for (std::size_t k = 0; k < groups_.size(); ++k) priced_total += price[k];
    const std::size_t sellers = inst_.sellers.size();
    std::vector<double> full(sellers);
    for (std::size_t j = 0; j < sellers; ++j) {
      full[j] = seller_knapsack(j, 0, r[2 * j] / unit_b_[j], r[2 * j + 1] / unit_f_[j], price,
                                groups_.size());
      if (!std::isfinite(full[j])) return out;
    }
    for (std::size_t k = 0; k < groups_.size(); ++k) {
      std::vector<double> without(sellers);
      double others = 0.0;
      for (std::size_t j = 0; j < sellers; ++j) {
        without[j] = seller_knapsack(j, 0, r[2 * j] / unit_b_[j], r[2 * j + 1] / unit_f_[j], price, k);
        others += without[j];
      }
      for (std::size_t p : groups_[k].pairs) {
        const auto j = static_cast<std::size_t>(inst_.seller_slot[p]);
        const int cb = r[2 * j] / unit_b_[j] - inst_.bandwidth_demand[p] / unit_b_[j];
        const int cf = r[2 * j + 1] / unit_f_[j] - inst_.compute_demand[p] / unit_f_[j];
        const double forced = priced_total + others - without[j] + inst_.pairs[p].evaluation.margin -
                              price[k] + seller_knapsack(j, 0, cb, cf, price, k);
        if (forced + slack(forced) < cutoff) keep[p] = false;
      }
      const double skipped = priced_total - price[k] + others;
      if (must_[k] || skipped + slack(skipped) < cutoff) out.must_assign.push_back(groups_[k].buyer_id);
    }
    std::sort(out.must_assign.begin(), out.must_assign.end());
    return out;
  }

 private:

  struct Bounds {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool refined = false;
  };

  Residual canonical(std::size_t layer, Residual r) const {
    for (std::size_t d = 0; d < r.size(); ++d) {
      const int unit = d % 2 == 0 ? unit_b_[d / 2] : unit_f_[d / 2];
      const int clamped = std::min<int>(r[d], suffix_[layer][d]);
      r[d] = static_cast<std::uint16_t>(clamped - clamped % unit);
    }
    return r;
  }

  bool fits(const Residual& r, std::size_t p) const {
    const auto slot = static_cast<std::size_t>(inst_.seller_slot[p]);
    return r[2 * slot] >= inst_.bandwidth_demand[p] && r[2 * slot + 1] >= inst_.compute_demand[p];
  }

  Residual consume(Residual r, std::size_t p) const {
    const auto slot = static_cast<std::size_t>(inst_.seller_slot[p]);
    r[2 * slot] = static_cast<std::uint16_t>(r[2 * slot] - inst_.bandwidth_demand[p]);
    r[2 * slot + 1] = static_cast<std::uint16_t>(r[2 * slot + 1] - inst_.compute_demand[p]);
    return r;
  }

  Key key(const Residual& r) const {
    if constexpr (std::is_same_v<Key, std::uint64_t>) {
      std::uint64_t k = 0;
      for (std::size_t d = 0; d < r.size(); ++d) k += r[d] * stride_[d];
      return k;
    } else {
      return r;
    }
  }

  Bounds& entry(std::size_t layer, const Residual& r) {
    auto [it, inserted] = memo_[layer].try_emplace(key(r));
    if (inserted) {
      if (++states_ > cap_) {
        throw InstanceTooLarge("clearing DP exceeded " + std::to_string(cap_) +
                               " states; use a coarser resource quantum");
      }
      it->second.upper = bound(layer, r);
    }
    return it->second;
  }

  // Float noise allowance, well below the tie tolerance.
  static double slack(double x) { return 1e-13 * std::max(1.0, std::abs(x)); }

  // Searches for solutions better than the incumbent; returns a proven upper
  // bound on the optimal welfare from (layer, r).
  double explore(std::size_t layer, const Residual& r, double acc) {
    if (layer == groups_.size()) {
      incumbent_ = std::max(incumbent_, acc);
      return 0.0;
    }
    Bounds& b = entry(layer, r);
    if (acc + b.upper <= incumbent_ + slack(incumbent_)) return b.upper;
    if (!b.refined) {
      b.refined = true;
      b.upper = std::min(b.upper, refine(layer, r, incumbent_ - acc));
      if (acc + b.upper <= incumbent_ + slack(incumbent_)) return b.upper;
    }
    double upper = kInfeasible;
    for (std::size_t p : order_[layer]) {
      if (!fits(r, p)) continue;
      const double m = inst_.pairs[p].evaluation.margin;
      upper = std::max(upper, m + explore(layer + 1, canonical(layer + 1, consume(r, p)), acc + m));
    }
    if (!must_[layer]) upper = std::max(upper, explore(layer + 1, canonical(layer + 1, r), acc));
    b.upper = std::min(b.upper, upper == kInfeasible ? upper : upper + slack(upper));
    return b.upper;
  }

  // True when some completion from (layer, r) reaches welfare >= target.
  bool reach(std::size_t layer, const Residual& r, double target) {
    if (layer == groups_.size()) return target <= 0.0;
    if (target <= 0.0 && must_after_[layer] == 0) return true;
    Bounds& b = entry(layer, r);
    if (b.upper < target) return false;
    if (b.lower >= target) return true;
    if (!b.refined) {
      b.refined = true;
      b.upper = std::min(b.upper, refine(layer, r, target));
      if (b.upper < target) return false;
    }
    bool found = false;
    for (std::size_t p : order_[layer]) {
      if (!fits(r, p)) continue;
      const double m = inst_.pairs[p].evaluation.margin;
      if (reach(layer + 1, canonical(layer + 1, consume(r, p)), target - m)) {
        found = true;
        break;
      }
    }
    if (!found && !must_[layer]) found = reach(layer + 1, canonical(layer + 1, r), target);
    if (found) {
      b.lower = std::max(b.lower, target);
    } else {
      b.upper = std::min(b.upper, target);
    }
    return found;
  }

  // Upper bound on the optimal welfare from `layer` on: the smaller of
  // (a) each remaining buyer's best individually fitting margin,
  // (b) per-seller fractional knapsacks on the tighter resource and
  // (c) the resource-price relaxation with this layer's fitted prices.
  // The costlier knapsack relaxation is deferred to refine().
  double bound(std::size_t layer, const Residual& r) const {
    double by_buyer = 0.0;
    for (std::size_t k = layer; k < groups_.size(); ++k) {
      for (std::size_t p : order_[k]) {
        if (fits(r, p)) {
          by_buyer += inst_.pairs[p].evaluation.margin;
          break;
        }
      }
    }
    double by_seller = 0.0;
    for (std::size_t j = 0; j < inst_.sellers.size() && by_seller < by_buyer; ++j) {
      const double b = fractional(by_bandwidth_[layer][j], r[2 * j], inst_.bandwidth_demand);
      if (b == 0.0) continue;
      by_seller += std::min(b, fractional(by_compute_[layer][j], r[2 * j + 1], inst_.compute_demand));
    }
    double ub = std::min(by_buyer, by_seller);
    if (ub > 0.0) ub = std::min(ub, priced(layer, r, prices_[layer]));
    return ub + slack(ub);
  }

  // Remaining pairs from one layer on for one seller, densest first.
  using DensityList = std::vector<std::size_t>;

  void build_density_lists() {
    const std::size_t layers = groups_.size();
    const std::size_t sellers = inst_.sellers.size();
    by_bandwidth_.assign(layers, std::vector<DensityList>(sellers));
    by_compute_.assign(layers, std::vector<DensityList>(sellers));
    auto sort_by = [&](DensityList& list, const std::vector<int>& demand) {
      std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        return inst_.pairs[a].evaluation.margin * demand[b] >
               inst_.pairs[b].evaluation.margin * demand[a];
      });
    };
    for (std::size_t k = layers; k-- > 0;) {
      if (k + 1 < layers) {
        by_bandwidth_[k] = by_bandwidth_[k + 1];
        by_compute_[k] = by_compute_[k + 1];
      }
      for (std::size_t p : groups_[k].pairs) {
        const auto slot = static_cast<std::size_t>(inst_.seller_slot[p]);
        by_bandwidth_[k][slot].push_back(p);
        by_compute_[k][slot].push_back(p);
      }
      for (std::size_t j = 0; j < sellers; ++j) {
        sort_by(by_bandwidth_[k][j], inst_.bandwidth_demand);
        sort_by(by_compute_[k][j], inst_.compute_demand);
      }
    }
  }

  double fractional(const DensityList& list, int capacity, const std::vector<int>& demand) const {
    double total = 0.0;
    int left = capacity;
    for (std::size_t p : list) {
      const double m = inst_.pairs[p].evaluation.margin;
      if (demand[p] <= left) {
        total += m;
        left -= demand[p];
      } else if (left > 0) {
        total += m * left / demand[p];
        left = 0;
      }
    }
    return total;
  }

  // Whole-unit view of each seller: every demand on a seller is a multiple
  // of that seller's unit, so residuals can be counted in units.
  void build_units() {
    const std::size_t sellers = inst_.sellers.size();
    unit_b_.assign(sellers, 0);
    unit_f_.assign(sellers, 0);
    items_.assign(sellers, {});
    for (std::size_t k = 0; k < groups_.size(); ++k) {
      for (std::size_t p : groups_[k].pairs) {
        const auto j = static_cast<std::size_t>(inst_.seller_slot[p]);
        unit_b_[j] = std::gcd(unit_b_[j], inst_.bandwidth_demand[p]);
        unit_f_[j] = std::gcd(unit_f_[j], inst_.compute_demand[p]);
        items_[j].push_back({k, p, 0, 0});
      }
    }
    for (std::size_t j = 0; j < sellers; ++j) {
      unit_b_[j] = std::max(unit_b_[j], 1);
      unit_f_[j] = std::max(unit_f_[j], 1);
      for (Item& it : items_[j]) {
        it.db = inst_.bandwidth_demand[it.pair] / unit_b_[j];
        it.df = inst_.compute_demand[it.pair] / unit_f_[j];
      }
    }
  }

  struct Item {
    std::size_t layer;
    std::size_t pair;
    int db;
    int df;
  };
  mutable std::vector<double> table_;
  mutable std::vector<char> chose_;
  mutable std::vector<const Item*> used_;

  // Best priced margin one seller can pack into (cb, cf) units from the
  // buyers of layers >= `layer`, leaving out layer `exclude`. Infinite when
  // the table would be too large to be worth building.
  double seller_knapsack(std::size_t j, std::size_t layer, int cb, int cf,
                         const std::vector<double>& price, std::size_t exclude,
                         std::vector<int>* taken = nullptr,
                         std::vector<std::size_t>* picks = nullptr) const {
    if (cb < 0 || cf < 0) return -std::numeric_limits<double>::infinity();
    const int width = cf + 1;
    const std::size_t cells = static_cast<std::size_t>(cb + 1) * static_cast<std::size_t>(width);
    if (cells > kKnapsackCells) return std::numeric_limits<double>::infinity();
    const bool track = taken != nullptr || picks != nullptr;
    std::vector<double>& table = table_;
    table.assign(cells, 0.0);
    std::size_t used = 0;
    for (const Item& it : items_[j]) {
      if (it.layer < layer || it.layer == exclude) continue;
      const double w = inst_.pairs[it.pair].evaluation.margin - price[it.layer];
      if (w <= 0.0) continue;
      const int db = it.db;
      const int df = it.df;
      if (db > cb || df > cf) continue;
      char* mark = nullptr;
      if (track) {
        if (chose_.size() < (used + 1) * cells) chose_.resize((used + 1) * cells);
        if (used_.size() <= used) used_.resize(used + 1);
        used_[used] = &it;
        mark = chose_.data() + used * cells;
        std::fill(mark, mark + cells, char{0});
        ++used;
      }
      for (int b = cb; b >= db; --b) {
        double* row = table.data() + static_cast<std::size_t>(b * width);
        const double* src = table.data() + static_cast<std::size_t>((b - db) * width);
        for (int f = cf; f >= df; --f) {
          const double v = src[f - df] + w;
          if (v > row[f]) {
            row[f] = v;
            if (mark) mark[b * width + f] = 1;
          }
        }
      }
    }
    if (track) {
      int b = cb, f = cf;
      for (std::size_t n = used; n-- > 0;) {
        if (!chose_[n * cells + static_cast<std::size_t>(b * width + f)]) continue;
        if (taken) ++(*taken)[used_[n]->layer];
        if (picks) picks->push_back(used_[n]->pair);
        b -= used_[n]->db;
        f -= used_[n]->df;
      }
    }
    return table[cells - 1];
  }

  // Lagrangian bound relaxing buyer exclusivity: each buyer is charged its
  // price once, then every seller solves its own 2D knapsack exactly over
  // the priced margins. Valid for any nonnegative prices. When `taken` is
  // given it receives how many sellers picked each buyer.
  double packed(std::size_t layer, const Residual& r, const std::vector<double>& price,
                std::vector<int>* taken) const {
    double total = 0.0;
    for (std::size_t k = layer; k < groups_.size(); ++k) total += price[k];
    for (std::size_t j = 0; j < inst_.sellers.size(); ++j) {
      total += seller_knapsack(j, layer, r[2 * j] / unit_b_[j], r[2 * j + 1] / unit_f_[j], price,
                               groups_.size(), taken);
    }
    return total;
  }

  // Polyak subgradient steps on the buyer prices of the suffix problem at
  // (layer, r), aimed at `target`. Leaves the best prices in `price` and
  // returns their bound; stops once the bound falls to the target.
  double tune(std::size_t layer, const Residual& r, double target, int iterations,
              std::vector<double>& price) const {
    std::vector<int> taken(groups_.size(), 0);
    double best = packed(layer, r, price, &taken);
    if (!std::isfinite(best)) return best;
    const double goal = std::max(target, 0.0);
    std::vector<double> trial = price;
    double current = best, theta = 1.0;
    int stall = 0;
    for (int it = 0; it < iterations && best > goal + slack(goal); ++it) {
      double norm = 0.0;
      for (std::size_t k = layer; k < groups_.size(); ++k) {
        const double g = static_cast<double>(taken[k]) - 1.0;
        norm += g * g;
      }
      if (norm == 0.0) break;
      const double step = theta * (current - goal) / norm;
      for (std::size_t k = layer; k < groups_.size(); ++k) {
        // Buyers claimed by several sellers get dearer, unclaimed ones cheaper.
        trial[k] = std::max(0.0, trial[k] + step * (static_cast<double>(taken[k]) - 1.0));
      }
      std::fill(taken.begin(), taken.end(), 0);
      current = packed(layer, r, trial, &taken);
      if (current < best - slack(best)) {
        best = current;
        price = trial;
        stall = 0;
      } else if (++stall >= 5) {
        theta *= 0.5;
        stall = 0;
      }
    }
    return best;
  }

  double refine(std::size_t layer, const Residual& r, double target) const {
    double b = 0.0;
    if constexpr (kRefineIterations == 0) {
      b = packed(layer, r, buyer_prices_[layer], nullptr);
    } else {
      std::vector<double> price = buyer_prices_[layer];
      b = tune(layer, r, target, kRefineIterations, price);
    }
    return b + slack(b);
  }

  // Welfare of a quick greedy completion: buyers by their best margin,
  // each to its best fitting seller.
  double greedy(std::size_t layer, Residual r) const {
    std::vector<std::size_t> ks;
    for (std::size_t k = layer; k < groups_.size(); ++k) ks.push_back(k);
    std::stable_sort(ks.begin(), ks.end(), [&](std::size_t a, std::size_t b) {
      return inst_.pairs[order_[a].front()].evaluation.margin >
             inst_.pairs[order_[b].front()].evaluation.margin;
    });
    double total = 0.0;
    for (std::size_t k : ks) {
      for (std::size_t p : order_[k]) {
        if (!fits(r, p)) continue;
        total += inst_.pairs[p].evaluation.margin;
        r = consume(r, p);
        break;
      }
    }
    return total;
  }

  // Buyer prices for each suffix problem at full capacity, tuned toward a
  // greedy lower bound and warm-started from the next layer.
  void fit_buyer_prices() {
    const std::size_t layers = groups_.size();
    const std::size_t dims = 2 * inst_.sellers.size();
    Residual full(dims);
    for (std::size_t j = 0; j < inst_.sellers.size(); ++j) {
      full[2 * j] = static_cast<std::uint16_t>(inst_.bandwidth_capacity[j]);
      full[2 * j + 1] = static_cast<std::uint16_t>(inst_.compute_capacity[j]);
    }
    buyer_prices_.assign(layers, std::vector<double>(layers, 0.0));
    std::vector<double> price(layers, 0.0);
    for (std::size_t layer = layers; layer-- > 0;) {
      const Residual r = canonical(layer, full);
      tune(layer, r, greedy(layer, r), kBuyerPriceIterations, price);
      buyer_prices_[layer] = price;
    }
  }

  // Lagrangian bound: with nonnegative per-unit prices on every seller
  // resource, each buyer keeps its best priced margin and the sellers are
  // paid for their whole residual. Valid for any prices.
  double priced(std::size_t layer, const Residual& r, const std::vector<double>& price) const {
    double total = 0.0;
    for (std::size_t d = 0; d < r.size(); ++d) total += price[d] * r[d];
    for (std::size_t k = layer; k < groups_.size(); ++k) {
      double best = 0.0;
      for (std::size_t p : groups_[k].pairs) {
        if (!fits(r, p)) continue;
        best = std::max(best, reduced(p, price));
      }
      total += best;
    }
    return total;
  }

  double reduced(std::size_t p, const std::vector<double>& price) const {
    const auto slot = static_cast<std::size_t>(inst_.seller_slot[p]);
    return inst_.pairs[p].evaluation.margin - price[2 * slot] * inst_.bandwidth_demand[p] -
           price[2 * slot + 1] * inst_.compute_demand[p];
  }

  // Subgradient descent on resource prices for the suffix problem at
  // (layer, r), starting from `price`. Returns the lowest bound seen and
  // leaves the matching prices in `price`.
  double descend(std::size_t layer, const Residual& r, std::vector<double>& price,
                 int iterations) const {
    const std::size_t dims = price.size();
    std::vector<double> trial = price, usage(dims);
    double best = priced(layer, r, price);
    for (int it = 0; it < iterations; ++it) {
      std::fill(usage.begin(), usage.end(), 0.0);
      for (std::size_t k = layer; k < groups_.size(); ++k) {
        double top = 0.0;
        std::size_t pick = inst_.pairs.size();
        for (std::size_t p : groups_[k].pairs) {
          if (!fits(r, p)) continue;
          const double v = reduced(p, trial);
          if (v > top) {
            top = v;
            pick = p;
          }
        }
        if (pick == inst_.pairs.size()) continue;
        const auto slot = static_cast<std::size_t>(inst_.seller_slot[pick]);
        usage[2 * slot] += inst_.bandwidth_demand[pick];
        usage[2 * slot + 1] += inst_.compute_demand[pick];
      }
      double norm = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        usage[d] -= r[d];  // overuse is the negative subgradient
        norm += usage[d] * usage[d];
      }
      if (norm == 0.0) break;
      const double step = 0.5 * best / (norm * (1.0 + it));
      for (std::size_t d = 0; d < dims; ++d) trial[d] = std::max(0.0, trial[d] + step * usage[d]);
      const double v = priced(layer, r, trial);
      if (v < best) {
        best = v;
        price = trial;
      }
    }
    return best;
  }

  void fit_prices() {
    const std::size_t dims = 2 * inst_.sellers.size();
    Residual full(dims);
    for (std::size_t j = 0; j < inst_.sellers.size(); ++j) {
      full[2 * j] = static_cast<std::uint16_t>(inst_.bandwidth_capacity[j]);
      full[2 * j + 1] = static_cast<std::uint16_t>(inst_.compute_capacity[j]);
    }
    prices_.assign(groups_.size(), std::vector<double>(dims, 0.0));
    std::vector<double> price(dims, 0.0);
    for (std::size_t layer = groups_.size(); layer-- > 0;) {
      descend(layer, canonical(layer, full), price, 60);
      prices_[layer] = price;
    }
  }

  const QuantizedInstance& inst_;
  const std::vector<BuyerGroup>& groups_;
  std::size_t cap_;
  std::size_t states_ = 0;
  double incumbent_ = 0.0;
  std::vector<std::vector<int>> suffix_;
  std::vector<char> must_;
  std::vector<int> must_after_;
  std::vector<std::size_t> layer_of_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::vector<DensityList>> by_bandwidth_;
  std::vector<std::vector<DensityList>> by_compute_;
  static constexpr int kBuyerPriceIterations = 80;
  static constexpr int kRefineIterations = 0;
  static constexpr int kFixingIterations = 200;
  static constexpr int kLocalSearchPasses = 50;
  static constexpr std::size_t kKnapsackCells = 4096;
  std::vector<int> unit_b_, unit_f_;
  std::vector<std::vector<Item>> items_;
  std::vector<std::vector<double>> buyer_prices_;
  std::vector<std::vector<double>> prices_;
  std::vector<std::uint64_t> stride_;
  std::vector<std::unordered_map<Key, Bounds, Hash>> memo_;
};

// Full table over every residual vector: O(|U| * |options| * |S|). Only two
// value layers are kept; each state stores the decision taken there
// (0 = skip, k + 1 = k-th pair of the buyer), which is all the traceback needs.
class DenseSolver {
 public:
  using Decision = std::uint16_t;

  DenseSolver(const QuantizedInstance& inst, const std::vector<BuyerGroup>& groups,
              std::size_t space)
      : inst_(inst), groups_(groups), space_(space) {
    const std::size_t slots = inst.sellers.size();
    radix_.resize(2 * slots);
    stride_.resize(2 * slots);
    std::size_t s = 1;
    for (std::size_t j = 0; j < slots; ++j) {
      radix_[2 * j] = inst.bandwidth_capacity[j] + 1;
      radix_[2 * j + 1] = inst.compute_capacity[j] + 1;
    }
    for (std::size_t d = 0; d < radix_.size(); ++d) {
      stride_[d] = s;
      s *= static_cast<std::size_t>(radix_[d]);
    }
    for (const auto& g : groups) {
      if (g.pairs.size() >= std::numeric_limits<Decision>::max()) {
        throw InstanceTooLarge("too many candidate pairs for one buyer in the dense table");
      }
    }
    decision_.assign(groups.size() * space_, 0);
  }

  std::vector<CandidatePair> solve() {
    const std::size_t layers = groups_.size();
    std::vector<double> next(space_, 0.0), cur(space_);
    std::vector<int> digit(radix_.size());
    std::vector<double> options;
    for (std::size_t layer = layers; layer-- > 0;) {
      const auto& pairs = groups_[layer].pairs;
      Decision* pick = &decision_[layer * space_];
      std::fill(digit.begin(), digit.end(), 0);
      for (std::size_t s = 0; s < space_; ++s) {
        options.clear();
        double best = next[s];
        for (std::size_t p : pairs) {
          const auto slot = static_cast<std::size_t>(inst_.seller_slot[p]);
          const int db = inst_.bandwidth_demand[p];
          const int df = inst_.compute_demand[p];
          if (digit[2 * slot] < db || digit[2 * slot + 1] < df) {
            options.push_back(kInfeasible);
            continue;
          }
          const std::size_t to = s - db * stride_[2 * slot] - df * stride_[2 * slot + 1];
          options.push_back(inst_.pairs[p].evaluation.margin + next[to]);
          best = std::max(best, options.back());
        }
        cur[s] = best;
        pick[s] = static_cast<Decision>(choose(next[s], options) + 1);
        for (std::size_t d = 0; d < digit.size(); ++d) {
          if (++digit[d] < radix_[d]) break;
          digit[d] = 0;
        }
      }
      std::swap(cur, next);
    }

    std::vector<CandidatePair> accepted;
    std::size_t s = 0;
    for (std::size_t d = 0; d < radix_.size(); ++d) {
      s += static_cast<std::size_t>(radix_[d] - 1) * stride_[d];
    }
    for (std::size_t layer = 0; layer < layers; ++layer) {
      const Decision k = decision_[layer * space_ + s];
      if (k == 0) continue;
      const std::size_t p = groups_[layer].pairs[k - 1u];
      const auto slot = static_cast<std::size_t>(inst_.seller_slot[p]);
      s -= inst_.bandwidth_demand[p] * stride_[2 * slot] +
           inst_.compute_demand[p] * stride_[2 * slot + 1];
      accepted.push_back(inst_.pairs[p]);
    }
    return accepted;
  }

 private:
  const QuantizedInstance& inst_;
  const std::vector<BuyerGroup>& groups_;
  std::size_t space_;
  std::vector<int> radix_;
  std::vector<std::size_t> stride_;
  std::vector<Decision> decision_;
};

// Probe for a good incumbent, drop pairs that provably cannot appear in a
// near-optimal solution, then solve the reduced instance exactly.
// Rounds of incumbent search and pair fixing before the exact solve.
constexpr int kFixingRounds = 3;

// Finds a good incumbent, drops pairs (and skip options) that provably
// cannot appear in a near-optimal solution, then solves the reduced
// instance exactly.
template <class Key, class Hash>
std::vector<CandidatePair> search_clear(const QuantizedInstance& instance,
                                        const ClearingOptions& options, const Residual& initial) {
  QuantizedInstance current = instance;
  std::vector<int> must;
  double warm = 0.0;
  for (int round = 0; round < kFixingRounds; ++round) {
    const auto groups = group_by_buyer(current);
    if (groups.empty()) return {};
    SearchSolver<Key, Hash> probe(current, groups, options.state_cap, must);
    warm = std::max(warm, probe.warm_incumbent(initial));
    auto fixing = probe.viable_pairs(initial, warm);
    const bool changed = std::find(fixing.keep.begin(), fixing.keep.end(), false) !=
                             fixing.keep.end() ||
                         fixing.must_assign != must;
    must = std::move(fixing.must_assign);
    if (!changed) break;
    QuantizedInstance reduced = current;
    reduced.pairs.clear();
    reduced.seller_slot.clear();
    reduced.bandwidth_demand.clear();
    reduced.compute_demand.clear();
    for (std::size_t p = 0; p < current.pairs.size(); ++p) {
      if (!fixing.keep[p]) continue;
      reduced.pairs.push_back(current.pairs[p]);
      reduced.seller_slot.push_back(current.seller_slot[p]);
      reduced.bandwidth_demand.push_back(current.bandwidth_demand[p]);
      reduced.compute_demand.push_back(current.compute_demand[p]);
    }
    current = std::move(reduced);
  }
  const auto groups = group_by_buyer(current);
  if (groups.empty()) return {};
  SearchSolver<Key, Hash> solver(current, groups, options.state_cap, must);
  solver.seed_incumbent(warm);
  return solver.solve(initial);
}

}  // namespace

std::vector<CandidatePair> build_candidate_set(std::span<const PairEvaluation> evaluations) {
  std::vector<CandidatePair> out;
  for (const auto& e : evaluations) {
    if (e.best && e.best->margin > 0.0) out.push_back({e.buyer_id, e.seller_id, *e.best});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.buyer_id, a.seller_id) < std::tie(b.buyer_id, b.seller_id);
  });
  return out;
}

int floor_quanta(double amount, double step) {
  const double ratio = amount / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= kGridSnap) return static_cast<int>(nearest);
  return static_cast<int>(std::floor(ratio));
}

int ceil_quanta(double amount, double step) {
  const double ratio = amount / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= kGridSnap) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(ratio));
}

QuantizedInstance quantize_resources(std::span<const CandidatePair> pairs,
                                     std::span<const SellerCapacity> sellers,
                                     const ResourceQuantum& quantum) {
  if (!(quantum.bandwidth > 0.0) || !(quantum.compute > 0.0)) {
    throw ConfigError("resource quantum components must be positive");
  }
  QuantizedInstance inst;
  inst.quantum = quantum;
  inst.sellers.assign(sellers.begin(), sellers.end());
  for (const auto& s : sellers) {
    const int bq = floor_quanta(s.bandwidth, quantum.bandwidth);
    const int fq = floor_quanta(s.compute, quantum.compute);
    if (bq > std::numeric_limits<std::uint16_t>::max() ||
        fq > std::numeric_limits<std::uint16_t>::max()) {
      throw InstanceTooLarge("seller " + std::to_string(s.seller_id) +
                             " capacity exceeds 65535 quanta; use a coarser resource quantum");
    }
    inst.bandwidth_capacity.push_back(std::max(bq, 0));
    inst.compute_capacity.push_back(std::max(fq, 0));
  }

  std::vector<CandidatePair> ordered(pairs.begin(), pairs.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return std::tie(a.buyer_id, a.seller_id) < std::tie(b.buyer_id, b.seller_id);
  });
  for (const auto& p : ordered) {
    const int slot = slot_of(sellers, p.seller_id);
    if (slot < 0) throw ConfigError("pair references unknown seller " + std::to_string(p.seller_id));
    const int bq = ceil_quanta(p.evaluation.package.bandwidth, quantum.bandwidth);
    const int fq = ceil_quanta(p.evaluation.package.compute, quantum.compute);
    if (bq > inst.bandwidth_capacity[static_cast<std::size_t>(slot)] ||
        fq > inst.compute_capacity[static_cast<std::size_t>(slot)]) {
      ++inst.dropped;
      continue;
    }
    inst.pairs.push_back(p);
    inst.seller_slot.push_back(slot);
    inst.bandwidth_demand.push_back(bq);
    inst.compute_demand.push_back(fq);
  }
  return inst;
}

std::size_t full_state_space(const QuantizedInstance& instance) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    for (int c : {instance.bandwidth_capacity[j], instance.compute_capacity[j]}) {
      const auto radix = static_cast<std::size_t>(c) + 1;
      if (total > kMax / radix) return kMax;
      total *= radix;
    }
  }
  return total;
}

ClearingOutcome dp_clear(const QuantizedInstance& instance, const ClearingOptions& options) {
  const auto groups = group_by_buyer(instance);
  if (groups.empty()) return finalize({}, instance.sellers);

  const std::size_t space = full_state_space(instance);
  bool dense = false;
  switch (options.strategy) {
    case DpStrategy::kDense: dense = true; break;
    case DpStrategy::kSparse: dense = false; break;
    case DpStrategy::kAuto: dense = space <= options.dense_limit; break;
  }
  if (dense) {
    const std::size_t cells = (groups.size() + 1) * space;
    if (space > options.state_cap || cells / (groups.size() + 1) != space) {
      throw InstanceTooLarge("dense clearing table needs " + std::to_string(space) +
                             " states per layer; use a coarser resource quantum");
    }
    DenseSolver solver(instance, groups, space);
    return finalize(solver.solve(), instance.sellers);
  }

  Residual initial;
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    initial.push_back(static_cast<std::uint16_t>(instance.bandwidth_capacity[j]));
    initial.push_back(static_cast<std::uint16_t>(instance.compute_capacity[j]));
  }
  if (space != std::numeric_limits<std::size_t>::max()) {
    return finalize(search_clear<std::uint64_t, PackedHash>(instance, options, initial),
                    instance.sellers);
  }
  return finalize(search_clear<Residual, ResidualHash>(instance, options, initial),
                  instance.sellers);
}

ClearingOutcome brute_force_clear(std::span<const CandidatePair> pairs,
                                  std::span<const SellerCapacity> sellers) {
  if (pairs.size() > kBruteForceMaxPairs) {
    throw InstanceTooLarge("brute-force clearing refuses " + std::to_string(pairs.size()) +
                           " pairs (limit " + std::to_string(kBruteForceMaxPairs) + ")");
  }
  // Buyers in ascending id; options per buyer in seller-slot order.
  std::map<int, std::vector<std::pair<int, const CandidatePair*>>> by_buyer;
  for (const auto& p : pairs) {
    const int slot = slot_of(sellers, p.seller_id);
    if (slot < 0) throw ConfigError("pair references unknown seller " + std::to_string(p.seller_id));
    by_buyer[p.buyer_id].emplace_back(slot, &p);
  }
  std::vector<std::vector<std::pair<int, const CandidatePair*>>> buyers;
  for (auto& [id, opts] : by_buyer) {
    std::stable_sort(opts.begin(), opts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    buyers.push_back(opts);
  }

  std::vector<double> bw_left, cpu_left;
  for (const auto& s : sellers) {
    bw_left.push_back(s.bandwidth);
    cpu_left.push_back(s.compute);
  }

  std::vector<const CandidatePair*> current, best_set;
  double best = -1.0;
  // Depth-first in lexicographic order (skip before sellers, lower seller
  // first), so the first optimum found is the tie-break winner.
  auto search = [&](auto&& self, std::size_t k, double value) -> void {
    if (k == buyers.size()) {
      if (best < 0.0 || value > best + tie_tolerance(best)) {
        best = value;
        best_set = current;
      }
      return;
    }
    self(self, k + 1, value);
    for (const auto& [slot, pair] : buyers[k]) {
      const auto j = static_cast<std::size_t>(slot);
      const auto& pkg = pair->evaluation.package;
      if (pkg.bandwidth > bw_left[j] + kCapacitySlack || pkg.compute > cpu_left[j] + kCapacitySlack) {
        continue;
      }
      bw_left[j] -= pkg.bandwidth;
      cpu_left[j] -= pkg.compute;
      current.push_back(pair);
      self(self, k + 1, value + pair->evaluation.margin);
      current.pop_back();
      bw_left[j] += pkg.bandwidth;
      cpu_left[j] += pkg.compute;
    }
  };
  search(search, 0, 0.0);

  std::vector<CandidatePair> accepted;
  for (const auto* p : best_set) accepted.push_back(*p);
  return finalize(std::move(accepted), sellers);
}

ClearingOutcome ask_first_clear(std::span<const CandidatePair> pairs,
                                std::span<const SellerCapacity> sellers,
                                const ResourceQuantum& quantum) {
  const auto inst = quantize_resources(pairs, sellers, quantum);
  std::vector<std::size_t> order(inst.pairs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = inst.pairs[a];
    const auto& pb = inst.pairs[b];
    return std::tie(pa.evaluation.effective_ask, pa.buyer_id, pa.seller_id) <
           std::tie(pb.evaluation.effective_ask, pb.buyer_id, pb.seller_id);
  });

  auto bw_left = inst.bandwidth_capacity;
  auto cpu_left = inst.compute_capacity;
  std::vector<int> matched;
  std::vector<CandidatePair> accepted;
  for (std::size_t k : order) {
    const auto& p = inst.pairs[k];
    if (std::find(matched.begin(), matched.end(), p.buyer_id) != matched.end()) continue;
    const auto slot = static_cast<std::size_t>(inst.seller_slot[k]);
    if (inst.bandwidth_demand[k] > bw_left[slot] || inst.compute_demand[k] > cpu_left[slot]) continue;
    bw_left[slot] -= inst.bandwidth_demand[k];
    cpu_left[slot] -= inst.compute_demand[k];
    matched.push_back(p.buyer_id);
    accepted.push_back(p);
  }
  return finalize(std::move(accepted), sellers);
}

bool is_feasible(const ClearingOutcome& outcome, std::span<const SellerCapacity> sellers) {
  std::vector<int> buyers;
  std::vector<double> bw(sellers.size(), 0.0), cpu(sellers.size(), 0.0);
  for (const auto& p : outcome.accepted) {
    if (std::find(buyers.begin(), buyers.end(), p.buyer_id) != buyers.end()) return false;
    buyers.push_back(p.buyer_id);
    const int slot = slot_of(sellers, p.seller_id);
    if (slot < 0) return false;
    bw[static_cast<std::size_t>(slot)] += p.evaluation.package.bandwidth;
    cpu[static_cast<std::size_t>(slot)] += p.evaluation.package.compute;
  }
  for (std::size_t j = 0; j < sellers.size(); ++j) {
    if (bw[j] > sellers[j].bandwidth + kCapacitySlack) return false;
    if (cpu[j] > sellers[j].compute + kCapacitySlack) return false;
  }
  return true;
}

}  // namespace zebris
