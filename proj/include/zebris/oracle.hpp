#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zebris/clearing.hpp"
#include "zebris/rng.hpp"

namespace zebris {

/// A clearing instance whose capacities and demands are whole multiples of
/// `quantum`, so quantization is lossless.
struct ClearingInstance {
  std::vector<CandidatePair> pairs;
  std::vector<SellerCapacity> sellers;
};

ClearingInstance random_on_grid_instance(Rng& rng, int max_buyers, int max_sellers,
                                         const ResourceQuantum& quantum);

struct OracleMismatch {
  int instance = 0;
  double dp_welfare = 0.0;
  double brute_force_welfare = 0.0;
};

struct OracleReport {
  int instances = 0;
  std::vector<OracleMismatch> mismatches;
};

/// Differential test: dp_clear against brute_force_clear on random on-grid
/// instances with at most `max_buyers` buyers and `max_sellers` sellers.
OracleReport run_clearing_oracle(int instances, std::uint64_t seed, int max_buyers = 5,
                                 int max_sellers = 3, const ClearingOptions& options = {});

}  // namespace zebris
