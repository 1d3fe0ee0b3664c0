// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gnemech/errors.hpp"

namespace gnemech {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PropertyReport make(Property p, double residual, double tolerance) {
  PropertyReport r;
  r.property = p;
  r.residual = std::isnan(residual) ? kInf : residual;
  r.tolerance = tolerance;
  r.passed = r.residual <= tolerance;
  return r;
}

PropertyReport not_applicable(Property p, double tolerance, std::string why) {
  PropertyReport r = make(p, 0.0, tolerance);
  r.applicable = false;
  r.note = std::move(why);
  return r;
}

std::string format_welfare_gap(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double box_violation(double a) { return std::max({0.0, -a, a - 1.0}); }

double supply_of(const Scenario& s, PlayerId i, double a) {
  return s.fraction(i) * trust_value(s.platform(i).trust, std::clamp(a, 0.0, 1.0));
}

bool quasi_concave(const Scenario& s) {
  for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
    if (s.platform(i).valuation.family == ValuationFamily::kQuasiConcaveExp) return true;
  }
  return false;
}

double symmetry_gap(const Scenario& s, const Outcome& outcome, std::vector<double>& per_player) {
  double worst = 0.0;
  for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
    for (PlayerId l : s.rivals(i)) {
      // What l receives from i for its filter against what i pays for it.
      const double gap = std::abs(outcome.subsidy(l, i) - outcome.payment(i, l));
      per_player[l] = std::max(per_player[l], gap);
      worst = std::max(worst, gap);
    }
  }
  return worst;
}

}  // namespace

std::string to_string(Property p) {
  switch (p) {
    case Property::kBudgetBalance: return "budget_balance";
    case Property::kFeasibility: return "feasibility";
    case Property::kPriceConsistency: return "price_consistency";
    case Property::kStrongImplementation: return "strong_implementation";
    case Property::kIndividualRationality: return "individual_rationality";
    case Property::kPareto: return "pareto";
    case Property::kExtendedPriceSymmetry: return "extended_price_symmetry";
  }
  return "unknown";
}

PropertyReport check_budget_balance(const Outcome& outcome) {
  double sum = 0.0;
  for (double t : outcome.taxes) sum += t;
  auto r = make(Property::kBudgetBalance, std::abs(sum), kBudgetTolerance);
  r.details = outcome.taxes;
  return r;
}

PropertyReport check_feasibility(const Scenario& scenario, const Outcome& outcome) {
  const int n = scenario.num_platforms();
  std::vector<double> per(n + 1, 0.0);
  double supply = 0.0;
  for (PlayerId i = 1; i <= n; ++i) {
    const double a = outcome.allocation[i];
    const double own = supply_of(scenario, i, a);
    supply += own;
    per[i] = std::max(box_violation(a), outcome.min_trust[i] - own);
  }
  per[0] = std::max(box_violation(outcome.allocation[0]), outcome.allocation[0] - supply);
  auto r = make(Property::kFeasibility, *std::max_element(per.begin(), per.end()),
                kFeasibilityCheckTolerance);
  r.details = std::move(per);
  return r;
}

PropertyReport check_price_consistency(const Scenario& scenario, const MessageProfile& profile,
                                       const Outcome& outcome) {
  const int n = scenario.num_platforms();
  std::vector<double> per(n + 1, 0.0);
  per[0] = std::abs(profile.government.price - outcome.government_price);
  for (PlayerId i = 1; i <= n; ++i) {
    const auto& pm = profile.platform(i);
    auto agree = [&](PlayerId l) {
      if (pm.prices[l] <= kActivePriceThreshold) return;
      const double gap =
          std::abs(pm.filters[l] - proposal_mean_excluding(profile, scenario, l, i));
      per[i] = std::max(per[i], gap);
    };
    agree(kGovernment);
    for (PlayerId l : scenario.rivals(i)) agree(l);
  }
  if (scenario.variant() == Variant::kExtended) symmetry_gap(scenario, outcome, per);
  auto r = make(Property::kPriceConsistency, *std::max_element(per.begin(), per.end()),
                kPriceTolerance);
  r.details = std::move(per);
  return r;
}

PropertyReport check_extended_price_symmetry(const Scenario& scenario, const Outcome& outcome) {
  if (scenario.variant() != Variant::kExtended) {
    return not_applicable(Property::kExtendedPriceSymmetry, kPriceTolerance, "standard variant");
  }
  std::vector<double> per(scenario.num_players(), 0.0);
  auto r = make(Property::kExtendedPriceSymmetry, symmetry_gap(scenario, outcome, per),
                kPriceTolerance);
  r.details = std::move(per);
  return r;
}

bool is_verified_gne(const EquilibriumReport& report) {
  return report.verified && report.max_deviation_gain <= kDeviationTolerance;
}

PropertyReport check_strong_implementation(const Scenario& scenario,
                                           const EquilibriumReport& report,
                                           const std::vector<double>& optimum,
                                           double optimum_welfare) {
  if (quasi_concave(scenario)) {
    return not_applicable(Property::kStrongImplementation, kImplementationTolerance,
                          "not applicable: quasi-concave valuations");
  }
  if (!is_verified_gne(report)) {
    throw PreconditionError("strong implementation needs a verified equilibrium report");
  }
  if (!report.outcome) {
    throw PreconditionError("strong implementation needs an outcome");
  }
  const auto alloc = snap_to_box(report.outcome->allocation);
  std::vector<double> per(alloc.size(), 0.0);
  for (std::size_t k = 0; k < alloc.size(); ++k) per[k] = std::abs(alloc[k] - optimum[k]);
  const double dist = *std::max_element(per.begin(), per.end());
  double welfare_gap = kInf;
  try {
    const double w = social_welfare(scenario, alloc);
    welfare_gap = std::abs(w - optimum_welfare) / std::max(1.0, std::abs(optimum_welfare));
  } catch (const DomainError&) {
  }
  auto r = make(Property::kStrongImplementation, dist, kImplementationTolerance);
  r.passed = r.passed && welfare_gap <= kWelfareRelativeTolerance;
  r.details = std::move(per);
  r.note = "relative welfare gap " + format_welfare_gap(welfare_gap);
  return r;
}

PropertyReport check_strong_implementation(const Scenario& scenario,
                                           const EquilibriumReport& report,
                                           const CentralizedSolution& oracle) {
  return check_strong_implementation(scenario, report, oracle.actions, oracle.welfare);
}

PropertyReport check_individual_rationality(const Scenario& scenario,
                                            const EquilibriumReport& report) {
  auto margin = individual_rationality_margin(scenario, report);
  double worst = kInf;
  for (PlayerId i = 1; i <= scenario.num_platforms(); ++i) worst = std::min(worst, margin[i]);
  if (scenario.num_platforms() == 0) worst = 0.0;
  auto r = make(Property::kIndividualRationality, -worst, kRationalityTolerance);
  r.details = std::move(margin);
  return r;
}

PropertyReport check_pareto(const Scenario& scenario, const EquilibriumReport& report,
                            int samples, std::uint64_t seed) {
  if (!report.outcome) {
    auto r = make(Property::kPareto, kInf, 0.0);
    r.note = "no outcome";
    return r;
  }
  const auto res = pareto_check(scenario, *report.outcome, samples, seed);
  PropertyReport r;
  r.property = Property::kPareto;
  r.residual = res.best_improvement;
  r.tolerance = kParetoThreshold;
  r.passed = !res.witness.has_value();
  if (res.witness) {
    r.details = res.witness->utility_change;
    r.note = "witness found";
  }
  return r;
}

std::vector<PropertyReport> run_battery(const Scenario& scenario, const EquilibriumReport& report,
                                        const BatteryOptions& options) {
  std::vector<PropertyReport> out;
  if (!report.outcome) {
    for (Property p : {Property::kBudgetBalance, Property::kFeasibility}) {
      auto r = make(p, kInf, p == Property::kBudgetBalance ? kBudgetTolerance
                                                           : kFeasibilityCheckTolerance);
      r.note = "degenerate quotas, no outcome";
      out.push_back(std::move(r));
    }
    return out;
  }
  const Outcome& o = *report.outcome;
  out.push_back(check_budget_balance(o));
  out.push_back(check_feasibility(scenario, o));
  out.push_back(check_price_consistency(scenario, report.profile, o));
  out.push_back(check_extended_price_symmetry(scenario, o));
  if (quasi_concave(scenario)) {
    out.push_back(not_applicable(Property::kStrongImplementation, kImplementationTolerance,
                                 "not applicable: quasi-concave valuations"));
  } else if (!is_verified_gne(report)) {
    out.push_back(not_applicable(Property::kStrongImplementation, kImplementationTolerance,
                                 "skipped: profile is not a verified equilibrium"));
  } else {
    const auto oracle = options.oracle ? *options.oracle
                                       : solve_centralized(scenario, options.solver_tolerance);
    out.push_back(check_strong_implementation(scenario, report, oracle));
  }
  out.push_back(check_individual_rationality(scenario, report));
  out.push_back(check_pareto(scenario, report, options.pareto_samples, options.seed));
  return out;
}

bool all_passed(const std::vector<PropertyReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const PropertyReport& r) { return r.passed; });
}

}  // namespace gnemech
