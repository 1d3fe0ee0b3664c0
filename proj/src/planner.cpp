// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "gnemech/errors.hpp"
#include "gnemech/kernels.hpp"

namespace gnemech {

namespace {

void check_box(std::span<const double> actions) {
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (!(actions[k] >= 0.0 && actions[k] <= 1.0)) {
      throw DomainError("action " + std::to_string(k) + " = " + std::to_string(actions[k]) +
                        " outside [0,1]");
    }
  }
}

double welfare_unchecked(const Scenario& s, std::span<const double> a) {
  double w = government_value(s.government(), a[0]);
  for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
    w += valuation_value(s.platform(i).valuation, i, a);
  }
  return w;
}

double supply_of(const Scenario& s, std::span<const double> a) {
  double total = 0.0;
  for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
    total += s.fraction(i) * trust_value(s.platform(i).trust, a[i]);
  }
  return total;
}

// h' with the origin singularity of fractional powers replaced by a large finite slope.
double safe_trust_derivative(const TrustSpec& t, double a) {
  return trust_derivative(t, std::max(a, 1e-12));
}

}  // namespace

double social_welfare(const Scenario& scenario, std::span<const double> actions) {
  if (static_cast<int>(actions.size()) != scenario.num_players()) {
    throw DomainError("action vector has wrong size");
  }
  check_box(actions);
  return welfare_unchecked(scenario, actions);
}

std::vector<double> welfare_gradient(const Scenario& scenario, std::span<const double> a) {
  std::vector<double> g(a.size(), 0.0);
  const auto& gov = scenario.government();
  g[0] = gov.weight * gov.rho / (1.0 + gov.rho * a[0]);
  for (PlayerId i = 1; i <= scenario.num_platforms(); ++i) {
    const auto& v = scenario.platform(i).valuation;
    for (PlayerId k : scenario.competitors(i)) g[k] += valuation_partial(v, i, a, k);
  }
  return g;
}

double trust_gap(const Scenario& scenario, std::span<const double> actions) {
  return actions[0] - supply_of(scenario, actions);
}

double kkt_residual(const Scenario& scenario, std::span<const double> a, double nu) {
  auto d = welfare_gradient(scenario, a);
  d[0] -= nu;
  for (PlayerId i = 1; i <= scenario.num_platforms(); ++i) {
    if (nu != 0.0) d[i] += nu * scenario.fraction(i) * trust_derivative(scenario.platform(i).trust, a[i]);
  }
  double r = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    r = std::max(r, std::abs(a[k] - std::clamp(a[k] + d[k], 0.0, 1.0)));
  }
  const double gap = trust_gap(scenario, a);
  r = std::max(r, std::abs(nu * gap));
  r = std::max(r, std::max(gap, 0.0));
  return r;
}

namespace {

struct AugmentedLagrangian {
  const Scenario& s;
  double nu;
  double rho;

  double value(std::span<const double> a) const {
    const double shifted = std::max(0.0, nu + rho * trust_gap(s, a));
    return welfare_unchecked(s, a) - (shifted * shifted - nu * nu) / (2.0 * rho);
  }

  std::vector<double> gradient(std::span<const double> a) const {
    auto g = welfare_gradient(s, a);
    const double m = std::max(0.0, nu + rho * trust_gap(s, a));
    if (m > 0.0) {
      g[0] -= m;
      for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
        g[i] += m * s.fraction(i) * safe_trust_derivative(s.platform(i).trust, a[i]);
      }
    }
    return g;
  }
};

double projected_residual(std::span<const double> x, std::span<const double> g) {
  double r = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    r = std::max(r, std::abs(x[k] - std::clamp(x[k] + g[k], 0.0, 1.0)));
  }
  return r;
}

// Projected gradient ascent with Barzilai-Borwein trial steps and Armijo backtracking.
int maximize_in_box(const AugmentedLagrangian& L, std::vector<double>& x, double tol,
                    int max_iter, double armijo) {
  const std::size_t dim = x.size();
  auto g = L.gradient(x);
  double f = L.value(x);
  double step = 1.0;
  std::vector<double> xn(dim);
  for (int it = 0; it < max_iter; ++it) {
    if (projected_residual(x, g) <= tol) return it;
    double t = step;
    double fn = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 80; ++halving) {
      double dir = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        xn[k] = std::clamp(x[k] + t * g[k], 0.0, 1.0);
        dir += g[k] * (xn[k] - x[k]);
      }
      fn = L.value(xn);
      if (fn >= f + armijo * dir) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return it;  // no ascent representable in floating point
    auto gn = L.gradient(xn);
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double sk = xn[k] - x[k];
      ss += sk * sk;
      sy += sk * (gn[k] - g[k]);
    }
    step = sy < 0.0 ? std::clamp(ss / -sy, 1e-10, 1e10) : 1e3;
    x.swap(xn);
    g.swap(gn);
    f = fn;
  }
  return max_iter;
}

}  // namespace

CentralizedSolution solve_centralized(const Scenario& scenario, const SolverOptions& options) {
  if (!(options.tolerance > 0.0)) throw ParameterError("tolerance must be > 0");
  const int dim = scenario.num_players();
  std::vector<double> x(dim, 0.5);
  AugmentedLagrangian L{scenario, 0.0, options.initial_penalty};
  const double inner_tol = 0.1 * options.tolerance;
  double prev_violation = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  CentralizedSolution sol;
  for (int outer = 1; outer <= options.max_outer; ++outer) {
    sol.inner_iterations += maximize_in_box(L, x, inner_tol, options.max_inner, options.armijo);
    const double gap = trust_gap(scenario, x);
    const double violation = std::abs(std::max(gap, -L.nu / L.rho));
    L.nu = std::max(0.0, L.nu + L.rho * gap);
    sol.outer_iterations = outer;
    residual = kkt_residual(scenario, x, L.nu);
    if (residual <= options.tolerance) break;
    if (violation > 0.25 * prev_violation) L.rho *= options.penalty_growth;
    prev_violation = violation;
  }
  // Land exactly on the feasible side of the coupling constraint.
  x[0] = std::clamp(std::min(x[0], supply_of(scenario, x)), 0.0, 1.0);
  residual = kkt_residual(scenario, x, L.nu);
  if (residual > options.tolerance) {
    throw NonConvergenceError("centralized solver stopped with KKT residual " +
                                  std::to_string(residual),
                              residual);
  }
  sol.actions = x;
  sol.trust_multiplier = L.nu;
  sol.kkt_residual = residual;
  sol.welfare = social_welfare(scenario, x);
  sol.upper_multipliers.assign(dim, 0.0);
  sol.lower_multipliers.assign(dim, 0.0);
  auto d = welfare_gradient(scenario, x);
  d[0] -= L.nu;
  for (PlayerId i = 1; i <= scenario.num_platforms(); ++i) {
    if (L.nu != 0.0) {
      d[i] += L.nu * scenario.fraction(i) * trust_derivative(scenario.platform(i).trust, x[i]);
    }
  }
  for (int k = 0; k < dim; ++k) {
    if (x[k] >= 1.0) sol.upper_multipliers[k] = std::max(0.0, d[k]);
    if (x[k] <= 0.0) sol.lower_multipliers[k] = std::max(0.0, -d[k]);
  }
  sol.budget_binding = L.nu * x[0] > scenario.government().budget;
  return sol;
}

CentralizedSolution solve_centralized(const Scenario& scenario, double tolerance) {
  SolverOptions o;
  o.tolerance = tolerance;
  return solve_centralized(scenario, o);
}

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GNEMECH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

namespace {

struct Axis {
  std::vector<double> points;
  std::vector<double> own;     // separable welfare contribution
  std::vector<double> supply;  // n_k h_k(x)
};

std::vector<double> unit_grid(double step) {
  std::vector<double> pts;
  const long count = static_cast<long>(std::floor(1.0 / step + 1e-9));
  for (long j = 0; j <= count; ++j) pts.push_back(std::min(1.0, static_cast<double>(j) * step));
  if (pts.back() < 1.0) pts.push_back(1.0);
  return pts;
}

bool separable(const Scenario& s) {
  for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
    if (s.platform(i).valuation.family != ValuationFamily::kLogLinearQuadratic) return false;
  }
  return true;
}

// Weight on log(1 + a_k) summed over every platform that values k's filter.
double incoming_weight(const Scenario& s, PlayerId k) {
  double w = 0.0;
  for (PlayerId i : s.rivals(k)) w += s.platform(i).valuation.weight_of(k);
  return w;
}

Axis make_axis(const Scenario& s, PlayerId k, std::vector<double> pts) {
  Axis ax;
  ax.points = std::move(pts);
  const auto& v = s.platform(k).valuation;
  const double w_in = incoming_weight(s, k);
  for (double x : ax.points) {
    ax.own.push_back(w_in * std::log1p(x) - v.own_linear_cost * x - v.own_quadratic_cost * x * x);
    ax.supply.push_back(s.fraction(k) * trust_value(s.platform(k).trust, x));
  }
  return ax;
}

struct Incumbent {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> index;
};

// Scans outer multi-indices [begin, end) of platforms 1..I-1; platform I is the row.
Incumbent scan_range(const Scenario& s, const std::vector<Axis>& axes, long long begin,
                     long long end, bool fast) {
  const int n = s.num_platforms();
  const auto& gov = s.government();
  const auto& row = axes[n];
  Incumbent best;
  std::vector<std::size_t> idx(n + 1, 0);
  long long rem = begin;
  for (int k = n - 1; k >= 1; --k) {
    idx[k] = static_cast<std::size_t>(rem % static_cast<long long>(axes[k].points.size()));
    rem /= static_cast<long long>(axes[k].points.size());
  }
  std::vector<double> a(n + 1, 0.0);
  for (long long flat = begin; flat < end; ++flat) {
    if (fast) {
      double base_value = 0.0, base_supply = 0.0;
      for (int k = 1; k < n; ++k) {
        base_value += axes[k].own[idx[k]];
        base_supply += axes[k].supply[idx[k]];
      }
      const auto rb = kernels::reduce_grid_row(row.own.data(), row.supply.data(), row.points.size(),
                                               base_value, base_supply, gov.weight, gov.rho);
      if (rb.value > best.value) {
        best.value = rb.value;
        best.index = idx;
        best.index[n] = rb.index;
      }
    } else {
      double base_supply = 0.0;
      for (int k = 1; k < n; ++k) {
        a[k] = axes[k].points[idx[k]];
        base_supply += axes[k].supply[idx[k]];
      }
      for (std::size_t j = 0; j < row.points.size(); ++j) {
        a[n] = row.points[j];
        a[0] = gov.weight > 0.0 ? std::min(1.0, base_supply + row.supply[j]) : 0.0;
        const double v = welfare_unchecked(s, a);
        if (v > best.value) {
          best.value = v;
          best.index = idx;
          best.index[n] = j;
        }
      }
    }
    for (int k = n - 1; k >= 1; --k) {
      if (++idx[k] < axes[k].points.size()) break;
      idx[k] = 0;
    }
  }
  return best;
}

Incumbent scan(const Scenario& s, const std::vector<Axis>& axes, int threads) {
  const int n = s.num_platforms();
  long long outer = 1;
  for (int k = 1; k < n; ++k) outer *= static_cast<long long>(axes[k].points.size());
  const bool fast = separable(s);
  const int workers = static_cast<int>(std::min<long long>(worker_count(threads), outer));
  std::vector<Incumbent> parts(workers);
  if (workers == 1) {
    parts[0] = scan_range(s, axes, 0, outer, fast);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const long long b = outer * w / workers, e = outer * (w + 1) / workers;
      pool.emplace_back([&, w, b, e] { parts[w] = scan_range(s, axes, b, e, fast); });
    }
    for (auto& t : pool) t.join();
  }
  // Chunks are in grid order, so a strict comparison keeps the first-found incumbent.
  Incumbent best;
  for (auto& p : parts) {
    if (p.value > best.value) best = std::move(p);
  }
  return best;
}

std::vector<double> to_actions(const Scenario& s, const std::vector<Axis>& axes,
                               const Incumbent& inc) {
  const int n = s.num_platforms();
  std::vector<double> a(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) a[k] = axes[k].points[inc.index[k]];
  a[0] = s.government().weight > 0.0 ? std::min(1.0, supply_of(s, a)) : 0.0;
  return a;
}

}  // namespace

GridSolution brute_force_centralized(const Scenario& scenario, double grid_step,
                                     const GridOptions& options) {
  if (scenario.num_players() > 5) {
    throw ScaleError("grid oracle supports at most 5 players, scenario has " +
                     std::to_string(scenario.num_players()));
  }
  if (!(grid_step > 0.0 && grid_step <= 0.1)) {
    throw ParameterError("grid step must lie in (0, 0.1]");
  }
  const int n = scenario.num_platforms();
  std::vector<Axis> axes(n + 1);
  for (PlayerId k = 1; k <= n; ++k) axes[k] = make_axis(scenario, k, unit_grid(grid_step));
  auto inc = scan(scenario, axes, options.threads);
  GridSolution out;
  out.points_scanned = 1;
  for (PlayerId k = 1; k <= n; ++k) out.points_scanned *= static_cast<long long>(axes[k].points.size());
  out.actions = to_actions(scenario, axes, inc);
  out.resolution = grid_step;

  if (options.refine) {
    const double fine = grid_step / 10.0;
    std::vector<Axis> local(n + 1);
    long long count = 1;
    for (PlayerId k = 1; k <= n; ++k) {
      const double c = out.actions[k];
      std::vector<double> pts;
      for (int j = -10; j <= 10; ++j) {
        const double x = j == 0 ? c : c + j * fine;
        if (x >= -1e-12 && x <= 1.0 + 1e-12) pts.push_back(std::clamp(x, 0.0, 1.0));
      }
      count *= static_cast<long long>(pts.size());
      local[k] = make_axis(scenario, k, std::move(pts));
    }
    inc = scan(scenario, local, options.threads);
    out.actions = to_actions(scenario, local, inc);
    out.points_scanned += count;
    out.resolution = fine;
  }
  out.welfare = social_welfare(scenario, out.actions);
  return out;
}

}  // namespace gnemech
