#pragma once

#include "zebris/params.hpp"
#include "zebris/rng.hpp"
#include "zebris/settlement.hpp"

namespace zebris {

double logistic(double x);

/// sigma(tau0 + tau1*q + tau2*deposit/ask). Throws DomainError for ask <= 0.
double effort_level(double posture, double deposit, double effective_ask, const EffortModel& model);

/// Samples one trade's runtime compliance. Draw order is fixed (one uniform
/// per authentication event, one per policy check, one for delay), so two
/// calls on identically seeded streams are coupled: a higher effort never
/// gives fewer successes, more violations, or a longer delay.
ComplianceMeasurement draw_compliance(double effort, double planned_delay, const EffortModel& model,
                                      Rng& rng);

}  // namespace zebris
