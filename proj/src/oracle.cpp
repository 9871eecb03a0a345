#include "zebris/oracle.hpp"

#include <algorithm>

namespace zebris {

ClearingInstance random_on_grid_instance(Rng& rng, int max_buyers, int max_sellers,
                                         const ResourceQuantum& quantum) {
  ClearingInstance inst;
  const int sellers = 1 + static_cast<int>(rng.uniform01() * max_sellers);
  const int buyers = 1 + static_cast<int>(rng.uniform01() * max_buyers);
  for (int j = 0; j < sellers; ++j) {
    const int bq = 2 + static_cast<int>(rng.uniform01() * 15);
    const int fq = 2 + static_cast<int>(rng.uniform01() * 15);
    inst.sellers.push_back({j, bq * quantum.bandwidth, fq * quantum.compute});
  }
  for (int i = 0; i < buyers; ++i) {
    for (int j = 0; j < sellers; ++j) {
      if (rng.uniform01() < 0.25) continue;  // pair screened out
      CandidatePair p;
      p.buyer_id = i;
      p.seller_id = j;
      const int bq = 1 + static_cast<int>(rng.uniform01() * 8);
      const int fq = 1 + static_cast<int>(rng.uniform01() * 8);
      p.evaluation.package = Package{bq * quantum.bandwidth, fq * quantum.compute, 0.6};
      p.evaluation.margin = 0.05 + rng.uniform01() * 10.0;
      p.evaluation.effective_ask = 1.0 + rng.uniform01() * 6.0;
      p.evaluation.effective_valuation = p.evaluation.effective_ask + p.evaluation.margin;
      p.evaluation.feasible = true;
      inst.pairs.push_back(p);
    }
  }
  return inst;
}

OracleReport run_clearing_oracle(int instances, std::uint64_t seed, int max_buyers,
                                 int max_sellers, const ClearingOptions& options) {
  OracleReport report;
  Rng rng(seed);
  for (int k = 0; k < instances; ++k) {
    const auto inst = random_on_grid_instance(rng, max_buyers, max_sellers, options.quantum);
    const auto dp = dp_clear(quantize_resources(inst.pairs, inst.sellers, options.quantum), options);
    const auto bf = brute_force_clear(inst.pairs, inst.sellers);
    ++report.instances;
    if (dp.welfare != bf.welfare) report.mismatches.push_back({k, dp.welfare, bf.welfare});
  }
  return report;
}

}  // namespace zebris
