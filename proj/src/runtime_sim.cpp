#include "zebris/runtime_sim.hpp"

#include <cmath>

#include "zebris/errors.hpp"

namespace zebris {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double effort_level(double posture, double deposit, double effective_ask, const EffortModel& model) {
  if (!(effective_ask > 0.0)) throw DomainError("effort level needs a positive effective ask");
  return logistic(model.tau0 + model.tau1 * posture + model.tau2 * deposit / effective_ask);
}

ComplianceMeasurement draw_compliance(double effort, double planned_delay, const EffortModel& model,
                                      Rng& rng) {
  if (!(planned_delay > 0.0)) throw DomainError("planned delay must be positive");
  ComplianceMeasurement m;
  m.auth_requested = model.auth_events_per_trade;
  for (int k = 0; k < m.auth_requested; ++k) {
    if (rng.uniform01() < effort) ++m.auth_succeeded;
  }
  m.checks = model.policy_checks_per_trade;
  const double violation_prob = model.violation_scale * (1.0 - effort);
  for (int k = 0; k < m.checks; ++k) {
    if (rng.uniform01() < violation_prob) ++m.violations;
  }
  m.realized_delay = planned_delay * (1.0 + model.delay_inflation * (1.0 - effort) * rng.uniform01());
  return m;
}

}  // namespace zebris
