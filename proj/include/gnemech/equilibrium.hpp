// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gnemech/mechanism.hpp"
#include "gnemech/model.hpp"
#include "gnemech/planner.hpp"

namespace gnemech {

/// Targets a platform steers the allocation to. `filters` is indexed by
/// player id; only entries in C_i are used.
struct ReducedAction {
  double min_trust = 0.0;
  std::vector<double> filters;
  double lower_bound_target = 0.0;
};

enum class EquilibriumMethod { kConstructed, kDynamics };
std::string to_string(EquilibriumMethod m);

struct DeviationSearch {
  double grid_step = 0.05;
  int refine_iterations = 200;
  int threads = 0;
};

struct DeviationResult {
  double max_gain = 0.0;
  PlayerId argmax_player = kGovernment;
  std::vector<double> gains;  // per player id
};

struct EquilibriumReport {
  MessageProfile profile;
  std::optional<Outcome> outcome;  // empty when the profile has degenerate quotas
  EquilibriumMethod method = EquilibriumMethod::kConstructed;
  int iterations = 0;
  double message_residual = 0.0;
  bool converged = true;
  bool verified = false;  // deviation search has been run
  double max_deviation_gain = 0.0;
  PlayerId deviation_player = kGovernment;
  std::vector<double> utilities;  // per player id, -inf when infeasible
};

/// Ã_k^i such that the mean of proposals for k (0 = lower bound) equals target,
/// holding every other proposal fixed.
double invert_proposal(const MessageProfile& profile, const Scenario& scenario, PlayerId k,
                       PlayerId i, double target);

/// Equilibrium message profile built from a planner optimum. Throws
/// ConstructionError on a |C| = 2 platform in the standard variant or a
/// negative price.
MessageProfile construct_gne(const Scenario& scenario, const CentralizedSolution& centralized);

/// Platform i's reply to the other messages in `profile` (its own message is
/// ignored). Rival and lower-bound prices follow the marginal-valuation rule;
/// filter and quota targets maximize the resulting utility exactly.
PlatformMessage best_response_platform(const Scenario& scenario, PlayerId i,
                                       const MessageProfile& profile);
/// The targets behind best_response_platform.
ReducedAction best_reduced_action(const Scenario& scenario, PlayerId i,
                                  const MessageProfile& profile);

GovernmentMessage best_response_government(const Scenario& scenario,
                                           const MessageProfile& profile);

enum class SweepOrder { kGaussSeidel, kJacobi };

struct DynamicsParams {
  SweepOrder order = SweepOrder::kGaussSeidel;
  double damping = 0.5;
  double tolerance = 1e-8;
  int max_sweeps = 500;
  bool verify = true;
  DeviationSearch search;
};

EquilibriumReport iterate_dynamics(const Scenario& scenario, const MessageProfile& init,
                                   const DynamicsParams& params = {});

/// Largest unilateral utility gain found by a grid plus gradient search.
/// A lower bound on the true best deviation.
DeviationResult verify_gne(const Scenario& scenario, const MessageProfile& profile,
                           const DeviationSearch& search = {});

/// Outcome, utilities and (optionally) the deviation search for a profile.
EquilibriumReport make_report(const Scenario& scenario, const MessageProfile& profile,
                              EquilibriumMethod method, bool verify,
                              const DeviationSearch& search = {});

struct ParetoWitness {
  std::vector<double> allocation;
  std::vector<double> utility_change;  // per player id
  double best_improvement = 0.0;
};

struct ParetoResult {
  std::optional<ParetoWitness> witness;
  double best_improvement = 0.0;  // over candidates that hurt nobody
};

/// Samples feasible perturbations of the outcome's allocation with taxes held
/// fixed. A witness raises some utility by more than 1e-6 and lowers none by
/// more than 1e-9.
ParetoResult pareto_check(const Scenario& scenario, const Outcome& outcome, int sample_count,
                          std::uint64_t seed);

/// u_i(m*) - v_i(0, ..., 0) per player id (entry 0 unused).
std::vector<double> individual_rationality_margin(const Scenario& scenario,
                                                  const EquilibriumReport& report);

/// u_0 from allocations and prices alone; quotas do not enter it.
/// -inf when the lower bound is outside [0,1] or over budget.
double government_utility(const Scenario& scenario, const MessageProfile& profile);

}  // namespace gnemech
