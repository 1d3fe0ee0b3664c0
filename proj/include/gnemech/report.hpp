// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnemech/equilibrium.hpp"
#include "gnemech/planner.hpp"
#include "gnemech/verification.hpp"

namespace gnemech {

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double x);

struct RunSummary {
  double welfare = 0.0;
  double budget_residual = 0.0;
  std::optional<double> implementation_gap;  // blank when not computed
  double max_deviation_gain = 0.0;
  int iterations = 0;
  Variant variant = Variant::kStandard;
};

RunSummary summarize(const Scenario& scenario, const EquilibriumReport& report,
                     const std::vector<PropertyReport>& properties);

/// player_id,alpha,eta,tax,utility; the government row (id 0) leaves eta blank.
std::string player_csv(const Scenario& scenario, const EquilibriumReport& report);
/// welfare,budget_residual,implementation_gap,max_deviation_gain,iterations,variant
std::string summary_csv(const RunSummary& summary);
/// property,applicable,residual,tolerance,passed,note
std::string property_csv(const std::vector<PropertyReport>& properties);
/// player_id,action,upper_multiplier,lower_multiplier, then a blank line and
/// welfare,trust_multiplier,kkt_residual,outer_iterations
std::string solution_csv(const CentralizedSolution& solution);

/// Writes the per-player table to `path`, the summary to <path>.summary.csv
/// and the property table to <path>.properties.csv. Throws IOError.
void write_report(const Scenario& scenario, const EquilibriumReport& report,
                  const std::vector<PropertyReport>& properties, const std::string& path);

struct SweepRow {
  std::uint64_t seed = 0;
  int platforms = 0;
  double welfare = 0.0;
  double budget_residual = 0.0;
  double feasibility_residual = 0.0;
  double price_residual = 0.0;
  double implementation_gap = 0.0;
  double rationality_residual = 0.0;
  double max_deviation_gain = 0.0;
  bool pareto_passed = false;
  bool passed = false;
  std::string error;  // non-empty when the run threw
};

/// Rows are written in seed order whatever order they arrive in.
std::string sweep_csv(std::vector<SweepRow> rows);

}  // namespace gnemech
