#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "zebris/clearing.hpp"
#include "zebris/market_model.hpp"
#include "zebris/package_eval.hpp"

namespace zebris::test {

inline BuyerRequest buyer(int id = 0) {
  BuyerRequest b;
  b.buyer_id = id;
  b.data_size_mb = 0.5;
  b.workload_gcycles = 0.5;
  b.deadline_s = 1.0;
  b.privacy_sensitivity = 0.8;
  b.min_security = 0.5;
  b.gross_valuation = 12.0;
  b.delay_penalty = 4.0;
  b.privacy_penalty = 3.0;
  return b;
}

inline SellerState seller(int id = 0) {
  SellerState s;
  s.seller_id = id;
  s.bandwidth_mhz = 8.0;
  s.compute_gcps = 24.0;
  s.posture = 0.5;
  s.verification_levels = {0.3, 0.6, 0.9};
  s.base_ask = 3.0;
  s.unit_bandwidth_cost = 0.1;
  s.unit_compute_cost = 0.2;
  return s;
}

/// Candidate pair with the given margin and package footprint; valuation and
/// ask straddle the margin so the midpoint identities are easy to check.
inline CandidatePair pair(int b, int s, double margin, double bandwidth = 1.0,
                          double compute = 1.0, double ask = 4.0) {
  CandidatePair p;
  p.buyer_id = b;
  p.seller_id = s;
  p.evaluation.package = Package{bandwidth, compute, 0.6};
  p.evaluation.effective_ask = ask;
  p.evaluation.effective_valuation = ask + margin;
  p.evaluation.margin = margin;
  p.evaluation.feasible = true;
  return p;
}

/// Exhaustive maximum welfare over buyer -> (seller | none) with real
/// capacities. Written independently of the library's search.
inline double exhaustive_welfare(const std::vector<CandidatePair>& pairs,
                                 const std::vector<SellerCapacity>& sellers,
                                 double slack = 1e-9) {
  std::vector<int> buyers;
  for (const auto& p : pairs) {
    if (std::find(buyers.begin(), buyers.end(), p.buyer_id) == buyers.end()) {
      buyers.push_back(p.buyer_id);
    }
  }
  std::vector<double> bw(sellers.size()), cp(sellers.size());
  for (std::size_t j = 0; j < sellers.size(); ++j) {
    bw[j] = sellers[j].bandwidth;
    cp[j] = sellers[j].compute;
  }
  auto slot = [&](int seller_id) {
    for (std::size_t j = 0; j < sellers.size(); ++j) {
      if (sellers[j].seller_id == seller_id) return j;
    }
    return sellers.size();
  };
  std::function<double(std::size_t)> go = [&](std::size_t k) -> double {
    if (k == buyers.size()) return 0.0;
    double best = go(k + 1);
    for (const auto& p : pairs) {
      if (p.buyer_id != buyers[k]) continue;
      const std::size_t j = slot(p.seller_id);
      if (j == sellers.size()) continue;
      const auto& pkg = p.evaluation.package;
      if (pkg.bandwidth > bw[j] + slack || pkg.compute > cp[j] + slack) continue;
      bw[j] -= pkg.bandwidth;
      cp[j] -= pkg.compute;
      best = std::max(best, p.evaluation.margin + go(k + 1));
      bw[j] += pkg.bandwidth;
      cp[j] += pkg.compute;
    }
    return best;
  };
  return go(0);
}

inline double accepted_welfare(const ClearingOutcome& out) {
  double w = 0.0;
  for (const auto& p : out.accepted) w += p.evaluation.margin;
  return w;
}

}  // namespace zebris::test
