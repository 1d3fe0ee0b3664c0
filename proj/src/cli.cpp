// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gnemech/equilibrium.hpp"
#include "gnemech/errors.hpp"
#include "gnemech/io.hpp"
#include "gnemech/planner.hpp"
#include "gnemech/report.hpp"
#include "gnemech/verification.hpp"

namespace gnemech {

std::string to_string(Command c) {
  switch (c) {
    case Command::kCentralized: return "centralized";
    case Command::kGneConstruct: return "gne-construct";
    case Command::kGneDynamics: return "gne-dynamics";
    case Command::kVerify: return "verify";
    case Command::kSweep: return "sweep";
  }
  return "unknown";
}

Command parse_command(const std::string& s) {
  for (Command c : {Command::kCentralized, Command::kGneConstruct, Command::kGneDynamics,
                    Command::kVerify, Command::kSweep}) {
    if (to_string(c) == s) return c;
  }
  throw ParameterError("unknown command '" + s + "'");
}

void validate_config(const RunConfig& c) {
  if (!(c.tolerance > 0.0) || !std::isfinite(c.tolerance)) {
    throw ParameterError("--tol must be > 0");
  }
  if (!(c.damping > 0.0 && c.damping <= 1.0)) throw ParameterError("--damping must be in (0, 1]");
  if (!(c.grid_step > 0.0 && c.grid_step <= 0.1)) {
    throw ParameterError("--grid-step must be in (0, 0.1]");
  }
  if (c.max_sweeps < 1) throw ParameterError("--max-sweeps must be >= 1");
  if (c.samples < 0) throw ParameterError("--samples must be >= 0");
  if (c.command == Command::kSweep) {
    if (c.count < 1) throw ParameterError("--count must be >= 1");
  } else if (c.scenario.empty()) {
    throw ParameterError("--scenario is required");
  }
  if (c.command == Command::kVerify && c.profile.empty()) {
    throw ParameterError("--profile is required for verify");
  }
}

namespace {

Scenario load(const RunConfig& c) {
  Scenario s = resolve_scenario(c.scenario);
  if (c.variant && *c.variant != s.variant()) s = with_variant(s, *c.variant);
  return s;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tolerance = c.tolerance;
  return o;
}

int finish(const RunConfig& c, const Scenario& s, const EquilibriumReport& report,
           const std::vector<PropertyReport>& props, std::ostream& out, bool extra_ok) {
  if (c.output.empty()) {
    out << player_csv(s, report) << '\n'
        << summary_csv(summarize(s, report, props)) << '\n'
        << property_csv(props);
  } else {
    write_report(s, report, props, c.output);
  }
  return all_passed(props) && is_verified_gne(report) && extra_ok ? kExitOk : kExitCheckFailed;
}

BatteryOptions battery(const RunConfig& c) {
  BatteryOptions b;
  b.pareto_samples = c.samples;
  b.seed = c.seed;
  b.solver_tolerance = c.tolerance;
  return b;
}

int run_centralized(const RunConfig& c, std::ostream& out) {
  const Scenario s = load(c);
  const auto sol = solve_centralized(s, solver_options(c));
  std::string text = solution_csv(sol);
  if (s.num_players() <= 5) {
    // Cross-check against the exhaustive scan.
    const auto grid = brute_force_centralized(s, c.grid_step);
    double gap = 0.0;
    for (std::size_t k = 0; k < grid.actions.size(); ++k) {
      gap = std::max(gap, std::abs(grid.actions[k] - sol.actions[k]));
    }
    text += "\ngrid_step,grid_welfare,grid_max_coordinate_gap\n" + format_number(c.grid_step) +
            ',' + format_number(grid.welfare) + ',' + format_number(gap) + '\n';
  }
  if (c.output.empty()) {
    out << text;
  } else {
    save_text(c.output, text);
  }
  return kExitOk;
}

int run_construct(const RunConfig& c, std::ostream& out) {
  const Scenario s = load(c);
  const auto sol = solve_centralized(s, solver_options(c));
  const auto profile = construct_gne(s, sol);
  const auto report = make_report(s, profile, EquilibriumMethod::kConstructed, true);
  auto opts = battery(c);
  opts.oracle = sol;
  return finish(c, s, report, run_battery(s, report, opts), out, true);
}

int run_dynamics(const RunConfig& c, std::ostream& out) {
  const Scenario s = load(c);
  DynamicsParams p;
  p.damping = c.damping;
  p.tolerance = c.tolerance;
  p.max_sweeps = c.max_sweeps;
  const auto report = iterate_dynamics(s, zero_profile(s), p);
  return finish(c, s, report, run_battery(s, report, battery(c)), out, report.converged);
}

int run_verify(const RunConfig& c, std::ostream& out) {
  const Scenario s = load(c);
  const auto profile = load_profile(c.profile, s);
  const auto report = make_report(s, profile, EquilibriumMethod::kConstructed, true);
  return finish(c, s, report, run_battery(s, report, battery(c)), out, true);
}

double residual_of(const std::vector<PropertyReport>& props, Property p) {
  for (const auto& r : props) {
    if (r.property == p) return r.residual;
  }
  return 0.0;
}

SweepRow sweep_one(const RunConfig& c, std::uint64_t seed) {
  SweepRow row;
  row.seed = seed;
  row.platforms = 3 + static_cast<int>(seed % 3);
  try {
    const Scenario s =
        gen_random_scenario(seed, row.platforms, c.variant.value_or(Variant::kStandard));
    const auto sol = solve_centralized(s, solver_options(c));
    DeviationSearch search;
    search.threads = 1;
    const auto report =
        make_report(s, construct_gne(s, sol), EquilibriumMethod::kConstructed, true, search);
    auto opts = battery(c);
    opts.oracle = sol;
    opts.seed = c.seed + seed;
    const auto props = run_battery(s, report, opts);
    for (double u : report.utilities) row.welfare += u;
    row.budget_residual = residual_of(props, Property::kBudgetBalance);
    row.feasibility_residual = residual_of(props, Property::kFeasibility);
    row.price_residual = residual_of(props, Property::kPriceConsistency);
    row.implementation_gap = residual_of(props, Property::kStrongImplementation);
    row.rationality_residual = residual_of(props, Property::kIndividualRationality);
    row.max_deviation_gain = report.max_deviation_gain;
    for (const auto& p : props) {
      if (p.property == Property::kPareto) row.pareto_passed = p.passed;
    }
    row.passed = all_passed(props) && is_verified_gne(report);
  } catch (const Error& e) {
    row.error = e.kind() + ": " + e.what();
  }
  return row;
}

int run_sweep(const RunConfig& c, std::ostream& out) {
  std::vector<SweepRow> rows(c.count);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < c.count; k = next++) rows[k] = sweep_one(c, c.seed + k);
  };
  const int workers = std::min(worker_count(), c.count);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  const std::string text = sweep_csv(rows);
  if (c.output.empty()) {
    out << text;
  } else {
    save_text(c.output, text);
  }
  for (const auto& r : rows) {
    if (!r.passed) return kExitCheckFailed;
  }
  return kExitOk;
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message,
                  const RunConfig& c) {
  nlohmann::json j = {{"error", kind}, {"message", message}, {"command", to_string(c.command)}};
  err << j.dump() << '\n';
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config);
    switch (config.command) {
      case Command::kCentralized: return run_centralized(config, out);
      case Command::kGneConstruct: return run_construct(config, out);
      case Command::kGneDynamics: return run_dynamics(config, out);
      case Command::kVerify: return run_verify(config, out);
      case Command::kSweep: return run_sweep(config, out);
    }
  } catch (const NonConvergenceError& e) {
    nlohmann::json j = {{"error", e.kind()},
                        {"message", e.what()},
                        {"command", to_string(config.command)},
                        {"residual", e.residual()}};
    err << j.dump() << '\n';
  } catch (const Error& e) {
    error_record(err, e.kind(), e.what(), config);
  } catch (const std::exception& e) {
    error_record(err, "InternalError", e.what(), config);
  }
  return kExitError;
}

}  // namespace gnemech
