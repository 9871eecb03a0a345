#include "zebris/package_eval.hpp"

#include <cmath>
#include <tuple>

#include "zebris/errors.hpp"

namespace zebris {

SecurityModel SecurityModel::standard() {
  return SecurityModel{
      [](double z, double q, const MechanismConfig& cfg) {
        return cfg.compliance_weight * z + (1.0 - cfg.compliance_weight) * q;
      },
      [](double z, double q) { return (1.0 - z) * (1.0 - q); }};
}

double transmission_rate(const Package& package, double sinr) {
  if (!(package.bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(sinr > 0.0)) throw DomainError("SINR must be positive");
  return package.bandwidth * std::log2(1.0 + sinr);
}

double service_delay(const BuyerRequest& buyer, const SellerState& seller, const Package& package,
                     double sinr, const MechanismConfig& cfg) {
  const double rate = transmission_rate(package, sinr);
  if (!(package.compute > 0.0)) throw DomainError("compute share must be positive");
  return 8.0 * buyer.data_size_mb / rate + buyer.workload_gcycles / package.compute +
         cfg.delay_verif_coeff * package.verification +
         cfg.delay_posture_coeff * (1.0 - seller.posture);
}

double compliance_score(double z, double q, const MechanismConfig& cfg) {
  return cfg.compliance_weight * z + (1.0 - cfg.compliance_weight) * q;
}

double privacy_risk(const BuyerRequest& buyer, double z, double q) {
  return buyer.privacy_sensitivity * (1.0 - z) * (1.0 - q);
}

double zt_cost(double z, double q, const MechanismConfig& cfg) {
  return cfg.zt_verif_cost * z + cfg.zt_posture_cost * (1.0 - q);
}

PackageEvaluation evaluate_package(const BuyerRequest& buyer, const SellerState& seller,
                                   const Package& package, double sinr,
                                   const MechanismConfig& cfg, const ValuationView& view,
                                   const SecurityModel& security) {
  PackageEvaluation e;
  e.package = package;
  e.rate = transmission_rate(package, sinr);
  e.delay = service_delay(buyer, seller, package, sinr, cfg);
  const double z = package.verification;
  const double q = seller.posture;
  e.compliance_score = security.compliance(z, q, cfg);
  e.privacy_risk = buyer.privacy_sensitivity * security.privacy_shape(z, q);
  e.zt_cost = zt_cost(z, q, cfg);

  e.effective_valuation = buyer.gross_valuation;
  if (view.delay_penalty) e.effective_valuation -= buyer.delay_penalty * e.delay;
  if (view.privacy_penalty) e.effective_valuation -= buyer.privacy_penalty * e.privacy_risk;

  e.effective_ask = seller.base_ask + seller.unit_bandwidth_cost * package.bandwidth +
                    seller.unit_compute_cost * package.compute;
  if (view.zt_cost) e.effective_ask += e.zt_cost;

  e.margin = e.effective_valuation - e.effective_ask;
  e.feasible = (!view.deadline_constraint || e.delay <= buyer.deadline_s) &&
               (!view.security_constraint || e.compliance_score >= buyer.min_security);
  return e;
}

std::optional<PackageEvaluation> best_feasible_package(
    const BuyerRequest& buyer, const SellerState& seller, std::span<const Package> candidates,
    double sinr, const MechanismConfig& cfg, const ValuationView& view,
    const SecurityModel& security) {
  std::optional<PackageEvaluation> best;
  const auto footprint = [](const Package& p) {
    return std::tuple(p.bandwidth, p.compute, p.verification);
  };
  for (const auto& pkg : candidates) {
    auto e = evaluate_package(buyer, seller, pkg, sinr, cfg, view, security);
    if (!e.feasible) continue;
    if (!best || e.margin > best->margin ||
        (e.margin == best->margin && footprint(e.package) < footprint(best->package))) {
      best = e;
    }
  }
  return best;
}

}  // namespace zebris
