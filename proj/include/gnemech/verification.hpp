// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnemech/equilibrium.hpp"
#include "gnemech/mechanism.hpp"
#include "gnemech/model.hpp"
#include "gnemech/planner.hpp"

namespace gnemech {

enum class Property {
  kBudgetBalance,
  kFeasibility,
  kPriceConsistency,
  kStrongImplementation,
  kIndividualRationality,
  kPareto,
  kExtendedPriceSymmetry,
};
std::string to_string(Property p);

inline constexpr double kBudgetTolerance = 1e-9;
inline constexpr double kFeasibilityCheckTolerance = 1e-9;
inline constexpr double kPriceTolerance = 1e-6;
inline constexpr double kImplementationTolerance = 1e-3;
inline constexpr double kWelfareRelativeTolerance = 1e-6;
inline constexpr double kRationalityTolerance = 1e-9;
inline constexpr double kParetoThreshold = 1e-6;
/// Largest deviation gain for which a verified report counts as an equilibrium.
inline constexpr double kDeviationTolerance = 1e-6;
/// Penalty weight below which a proposal is not required to agree with the others.
inline constexpr double kActivePriceThreshold = 1e-6;

struct PropertyReport {
  Property property = Property::kBudgetBalance;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool applicable = true;       // false: skipped, passed is true and residual 0
  std::vector<double> details;  // per player id; meaning depends on the property
  std::string note;
};

PropertyReport check_budget_balance(const Outcome& outcome);

PropertyReport check_feasibility(const Scenario& scenario, const Outcome& outcome);

/// Government price agreement, proposal agreement where the proposer's price
/// is active, and (extended variant) subsidy/payment symmetry.
PropertyReport check_price_consistency(const Scenario& scenario, const MessageProfile& profile,
                                       const Outcome& outcome);

/// Subsidy/payment symmetry alone. Not applicable in the standard variant.
PropertyReport check_extended_price_symmetry(const Scenario& scenario, const Outcome& outcome);

/// Sup-norm distance of the allocation from `optimum` (all coordinates,
/// including the lower bound). Also fails when the relative welfare gap
/// exceeds kWelfareRelativeTolerance. Not applicable for quasi-concave
/// valuations. Throws PreconditionError if the report is unverified.
PropertyReport check_strong_implementation(const Scenario& scenario,
                                           const EquilibriumReport& report,
                                           const std::vector<double>& optimum,
                                           double optimum_welfare);
PropertyReport check_strong_implementation(const Scenario& scenario,
                                           const EquilibriumReport& report,
                                           const CentralizedSolution& oracle);

PropertyReport check_individual_rationality(const Scenario& scenario,
                                            const EquilibriumReport& report);

PropertyReport check_pareto(const Scenario& scenario, const EquilibriumReport& report,
                            int samples, std::uint64_t seed);

struct BatteryOptions {
  int pareto_samples = 10000;
  std::uint64_t seed = 0;
  /// Strong implementation is compared against this point when given,
  /// otherwise against solve_centralized.
  std::optional<CentralizedSolution> oracle;
  double solver_tolerance = 1e-8;
};

/// Every applicable checker on one report. A report without an outcome
/// (degenerate quotas) yields failing budget and feasibility entries.
std::vector<PropertyReport> run_battery(const Scenario& scenario, const EquilibriumReport& report,
                                        const BatteryOptions& options = {});

/// Deviation search has run and found no gain above kDeviationTolerance.
bool is_verified_gne(const EquilibriumReport& report);

bool all_passed(const std::vector<PropertyReport>& reports);

}  // namespace gnemech
