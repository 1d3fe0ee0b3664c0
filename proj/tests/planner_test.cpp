// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "gnemech/errors.hpp"
#include "gnemech/fixtures.hpp"
#include "gnemech/planner.hpp"
#include "test_support.hpp"

namespace gnemech {
namespace {

using testing_support::central_difference;
using testing_support::reference_trust;
using testing_support::reference_welfare;
using testing_support::relative_gap;

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) g = std::max(g, std::abs(a[k] - b[k]));
  return g;
}

// Plain nested scan over {0, step, ..., 1}^3 with the bound set to min(1, supply).
std::pair<std::vector<double>, double> naive_grid_three(const Scenario& s, int steps) {
  std::vector<double> best, a(4);
  double best_w = -1e300;
  for (int x = 0; x <= steps; ++x) {
    for (int y = 0; y <= steps; ++y) {
      for (int z = 0; z <= steps; ++z) {
        a = {0.0, double(x) / steps, double(y) / steps, double(z) / steps};
        double supply = 0.0;
        for (PlayerId i = 1; i <= 3; ++i) {
          supply += s.fraction(i) * reference_trust(s.platform(i).trust, a[i]);
        }
        a[0] = s.government().weight > 0.0 ? std::min(1.0, supply) : 0.0;
        const double w = reference_welfare(s, a);
        if (w > best_w) {
          best_w = w;
          best = a;
        }
      }
    }
  }
  return {best, best_w};
}

TEST(SocialWelfare, Examples) {
  const auto s = fixtures::tri_sym();
  EXPECT_EQ(social_welfare(s, std::vector<double>(4, 0.0)), 0.0);
  const std::vector<double> a{0.45, 0.5, 0.5, 0.5};
  EXPECT_NEAR(social_welfare(s, a),
              2.0 * std::log(1.45) + 3.0 * (2.0 * std::log(1.5) - 0.3125), 1e-14);
  EXPECT_THROW(social_welfare(s, std::vector<double>{0, 1.1, 0, 0}), DomainError);
  EXPECT_THROW(social_welfare(s, std::vector<double>{0, 0, 0}), DomainError);
}

TEST(SocialWelfare, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen_random_scenario(trial, 3 + trial % 3, Variant::kStandard);
    std::vector<double> a(s.num_players());
    for (auto& x : a) x = unit(rng);
    const auto g = welfare_gradient(s, a);
    for (int k = 0; k < s.num_players(); ++k) {
      const double fd = central_difference(
          [&](double x) {
            auto b = a;
            b[k] = x;
            return reference_welfare(s, b);
          },
          a[k]);
      EXPECT_LE(relative_gap(g[k], fd), 1e-6);
    }
  }
}

TEST(SolveCentralized, ZeroBenefitIsAllZero) {
  const auto sol = solve_centralized(fixtures::zero_benefit());
  for (double a : sol.actions) EXPECT_NEAR(a, 0.0, 1e-9);
  EXPECT_NEAR(sol.welfare, 0.0, 1e-9);
}

TEST(SolveCentralized, TriSymMatchesNaiveGrid) {
  const auto s = fixtures::tri_sym();
  const auto sol = solve_centralized(s, 1e-8);
  const auto [grid, grid_w] = naive_grid_three(s, 100);
  EXPECT_LE(max_gap(sol.actions, grid), 0.02);
  EXPECT_GE(sol.welfare, grid_w - 1e-6);
  EXPECT_LE(sol.kkt_residual, 1e-8);
}

TEST(SolveCentralized, BoundIsTightForIncreasingGovernmentValue) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = gen_random_scenario(seed, 3 + seed % 3, Variant::kStandard);
    const auto sol = solve_centralized(s, 1e-8);
    double supply = 0.0;
    for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
      supply += s.fraction(i) * reference_trust(s.platform(i).trust, sol.actions[i]);
    }
    EXPECT_NEAR(sol.actions[0], std::min(supply, 1.0), 1e-7) << "seed " << seed;
    for (double a : sol.actions) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
    EXPECT_GE(sol.trust_multiplier, 0.0);
    for (double m : sol.upper_multipliers) EXPECT_GE(m, 0.0);
    for (double m : sol.lower_multipliers) EXPECT_GE(m, 0.0);
    EXPECT_LE(sol.kkt_residual, 1e-8);
  }
}

TEST(SolveCentralized, InteriorStationarity) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = gen_random_scenario(seed, 3 + seed % 3, Variant::kStandard);
    const auto sol = solve_centralized(s, 1e-8);
    const auto g = welfare_gradient(s, sol.actions);
    for (PlayerId i = 1; i <= s.num_platforms(); ++i) {
      const double a = sol.actions[i];
      if (a < 1e-6 || a > 1.0 - 1e-6) continue;
      const double dh = trust_derivative(s.platform(i).trust, a);
      EXPECT_LE(std::abs(g[i] + sol.trust_multiplier * s.fraction(i) * dh), 1e-6);
    }
  }
}

TEST(SolveCentralized, DeterministicAndMonotoneInGovernmentWeight) {
  const auto s = gen_random_scenario(8, 4, Variant::kStandard);
  const auto a = solve_centralized(s), b = solve_centralized(s);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_EQ(a.welfare, b.welfare);

  double previous = -1.0;
  for (double w0 = 0.0; w0 <= 8.0; w0 += 0.5) {
    ScenarioSpec spec = s.spec();
    spec.government.weight = w0;
    const auto sol = solve_centralized(validate_scenario(spec));
    EXPECT_GE(sol.actions[0], previous - 1e-7);
    previous = sol.actions[0];
  }
}

TEST(SolveCentralized, CapsRaiseNonConvergence) {
  SolverOptions o;
  o.max_outer = 1;
  o.max_inner = 1;
  o.tolerance = 1e-14;
  try {
    solve_centralized(gen_random_scenario(3, 4, Variant::kStandard), o);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(BruteForce, AgreesWithNaiveScan) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = gen_random_scenario(seed * 3, 3, Variant::kStandard);
    GridOptions o;
    o.refine = false;
    const auto grid = brute_force_centralized(s, 0.05, o);
    const auto [naive, naive_w] = naive_grid_three(s, 20);
    EXPECT_NEAR(grid.welfare, naive_w, 1e-12);
    EXPECT_LE(max_gap(grid.actions, naive), 1e-12);
  }
}

TEST(BruteForce, RefinementAndSolverAgreement) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto s = gen_random_scenario(seed, 3 + seed % 2, Variant::kStandard);
    const auto coarse = brute_force_centralized(s, 0.01);
    const auto finer = brute_force_centralized(s, 0.005);
    const auto sol = solve_centralized(s);
    EXPECT_LE(max_gap(coarse.actions, finer.actions), 0.01 + 1e-12);
    EXPECT_LE(coarse.welfare, sol.welfare + 1e-6);
    EXPECT_LE(max_gap(coarse.actions, sol.actions), 2 * 0.01);
    EXPECT_NEAR(coarse.resolution, 0.001, 1e-15);
  }
}

TEST(BruteForce, ZeroBenefitAndErrors) {
  const auto g = brute_force_centralized(fixtures::zero_benefit(), 0.05);
  for (double a : g.actions) EXPECT_EQ(a, 0.0);
  EXPECT_THROW(brute_force_centralized(gen_random_scenario(1, 5, Variant::kStandard), 0.05),
               ScaleError);
  EXPECT_THROW(brute_force_centralized(fixtures::tri_sym(), 0.2), ParameterError);
  EXPECT_THROW(brute_force_centralized(fixtures::tri_sym(), 0.0), ParameterError);
}

TEST(BruteForce, ThreadCountDoesNotChangeResult) {
  const auto s = gen_random_scenario(12, 4, Variant::kStandard);
  GridOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = brute_force_centralized(s, 0.02, one);
  const auto b = brute_force_centralized(s, 0.02, many);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_EQ(a.welfare, b.welfare);
}

TEST(WorkerCount, EnvironmentCap) {
  ::setenv("GNEMECH_THREADS", "2", 1);
  EXPECT_LE(worker_count(8), 2);
  ::unsetenv("GNEMECH_THREADS");
  EXPECT_EQ(worker_count(3), 3);
  EXPECT_GE(worker_count(), 1);
}

}  // namespace
}  // namespace gnemech
