// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "gnemech/model.hpp"

namespace gnemech {

/// Welfare optimum of the full-information planner problem.
/// All vectors are indexed by player id (entry 0 = government / lower bound).
struct CentralizedSolution {
  std::vector<double> actions;
  std::vector<double> upper_multipliers;  // a_k <= 1
  std::vector<double> lower_multipliers;  // a_k >= 0
  double trust_multiplier = 0.0;          // a_0 <= sum n_i h_i(a_i)
  double budget_multiplier = 0.0;         // always 0: the budget is checked ex post
  double welfare = 0.0;
  double kkt_residual = 0.0;
  bool budget_binding = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
};

struct SolverOptions {
  double tolerance = 1e-8;
  int max_outer = 200;
  int max_inner = 10000;
  double initial_penalty = 1.0;
  double penalty_growth = 10.0;
  double armijo = 1e-4;
};

/// v_0(a_0) + sum_i v_i. Throws DomainError outside the box.
double social_welfare(const Scenario& scenario, std::span<const double> actions);

/// Gradient of the welfare, indexed by player id. Trust derivatives are not involved.
std::vector<double> welfare_gradient(const Scenario& scenario, std::span<const double> actions);

/// a_0 - sum n_i h_i(a_i).
double trust_gap(const Scenario& scenario, std::span<const double> actions);

/// Max of projected stationarity, |multiplier * gap| and max(gap, 0) for a
/// candidate point and trust multiplier.
double kkt_residual(const Scenario& scenario, std::span<const double> actions,
                    double trust_multiplier);

/// Augmented Lagrangian on the trust coupling constraint with a projected
/// gradient inner solver. Throws NonConvergenceError when the caps are hit.
CentralizedSolution solve_centralized(const Scenario& scenario, const SolverOptions& options = {});
CentralizedSolution solve_centralized(const Scenario& scenario, double tolerance);

struct GridSolution {
  std::vector<double> actions;
  double welfare = 0.0;
  double resolution = 0.0;  // finest step used
  long long points_scanned = 0;
};

struct GridOptions {
  bool refine = true;  // one extra pass at step/10 in a +-step window
  int threads = 0;     // 0 = hardware concurrency capped by GNEMECH_THREADS
};

/// Exhaustive welfare scan over {0, step, ..., 1} per platform. For each
/// platform point the lower bound is set to its best feasible value
/// (min(1, sum n_i h_i) since v_0 is nondecreasing, or 0 when v_0 is flat).
/// Throws ScaleError for more than 5 players, ParameterError for a step
/// outside (0, 0.1].
GridSolution brute_force_centralized(const Scenario& scenario, double grid_step,
                                     const GridOptions& options = {});

/// Worker count from GNEMECH_THREADS and the hardware, at least 1.
int worker_count(int requested = 0);

}  // namespace gnemech
