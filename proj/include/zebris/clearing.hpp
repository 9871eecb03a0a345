#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zebris/package_eval.hpp"
#include "zebris/params.hpp"

namespace zebris {

/// Best-package result for one buyer-seller pair, before margin filtering.
struct PairEvaluation {
  int buyer_id = 0;
  int seller_id = 0;
  std::optional<PackageEvaluation> best;
};

/// A pair eligible for clearing: its best package has strictly positive margin.
struct CandidatePair {
  int buyer_id = 0;
  int seller_id = 0;
  PackageEvaluation evaluation{};
};

struct SellerCapacity {
  int seller_id = 0;
  double bandwidth = 0.0;
  double compute = 0.0;
};

struct ClearingOutcome {
  std::vector<CandidatePair> accepted;  // ascending buyer id
  double welfare = 0.0;                 // sum of accepted margins, buyer order
  std::vector<SellerCapacity> residual; // same order as the input sellers
};

/// Integer view of a clearing instance: capacities rounded down and
/// per-pair demands rounded up to whole quanta.
struct QuantizedInstance {
  ResourceQuantum quantum{};
  std::vector<SellerCapacity> sellers;  // real capacities, slot order
  std::vector<int> bandwidth_capacity;  // quanta per slot
  std::vector<int> compute_capacity;
  std::vector<CandidatePair> pairs;     // retained pairs, (buyer, seller) order
  std::vector<int> seller_slot;         // per pair
  std::vector<int> bandwidth_demand;    // quanta per pair
  std::vector<int> compute_demand;
  std::size_t dropped = 0;              // pairs that cannot fit even an empty seller
};

/// Pairs with margin > 0, ordered by (buyer id, seller id).
std::vector<CandidatePair> build_candidate_set(std::span<const PairEvaluation> evaluations);

/// Floor of x/step and ceiling of x/step, treating values within 1e-9 of a
/// grid point as on the grid.
int floor_quanta(double amount, double step);
int ceil_quanta(double amount, double step);

QuantizedInstance quantize_resources(std::span<const CandidatePair> pairs,
                                     std::span<const SellerCapacity> sellers,
                                     const ResourceQuantum& quantum);

/// Number of states in the full discretized residual-resource space, saturating.
std::size_t full_state_space(const QuantizedInstance& instance);

/// Welfare-maximizing clearing by a buyer-sequential DP over per-seller
/// residual quanta. Among value-equal choices a buyer is skipped first, then
/// assigned to the lowest seller. Throws InstanceTooLarge past the state cap.
ClearingOutcome dp_clear(const QuantizedInstance& instance, const ClearingOptions& options = {});

/// Exhaustive search over buyer -> (seller | none) with real capacities.
/// Same tie-break as dp_clear. Refuses more than kBruteForceMaxPairs pairs.
inline constexpr std::size_t kBruteForceMaxPairs = 20;
ClearingOutcome brute_force_clear(std::span<const CandidatePair> pairs,
                                  std::span<const SellerCapacity> sellers);

/// Greedy by ascending effective ask, then (buyer id, seller id). Capacity is
/// checked in the same quanta the DP uses.
ClearingOutcome ask_first_clear(std::span<const CandidatePair> pairs,
                                std::span<const SellerCapacity> sellers,
                                const ResourceQuantum& quantum);

/// True when the outcome respects buyer exclusiveness and real capacities
/// (within 1e-9).
bool is_feasible(const ClearingOutcome& outcome, std::span<const SellerCapacity> sellers);

}  // namespace zebris
