// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gnemech/errors.hpp"
#include "gnemech/fixtures.hpp"
#include "gnemech/model.hpp"
#include "test_support.hpp"

namespace gnemech {
namespace {

using testing_support::central_difference;
using testing_support::complete_spec;
using testing_support::reference_trust;
using testing_support::reference_valuation;
using testing_support::relative_gap;

TEST(ValidateScenario, AcceptsCompleteTriple) {
  const auto s = validate_scenario(complete_spec({100, 100, 100}, Variant::kStandard));
  EXPECT_EQ(s.num_platforms(), 3);
  EXPECT_EQ(s.num_players(), 4);
  EXPECT_EQ(s.competitor_count(2), 3);
  EXPECT_TRUE(s.competes(1, 3));
}

TEST(ValidateScenario, StandardPairIsCardinalityError) {
  auto spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[0].competitors = {1, 2};
  spec.platforms[1].competitors = {1, 2};
  spec.platforms[2].competitors = {3};
  EXPECT_THROW(validate_scenario(spec), CardinalityError);
}

TEST(ValidateScenario, ExtendedAdmitsPairs) {
  auto spec = complete_spec({100, 50}, Variant::kExtended);
  EXPECT_NO_THROW(validate_scenario(spec));
  spec.variant = Variant::kStandard;
  EXPECT_THROW(validate_scenario(spec), CardinalityError);
}

TEST(ValidateScenario, OneSidedCompetitionIsAsymmetry) {
  auto spec = complete_spec({1, 1, 1, 1}, Variant::kStandard);
  // 1 lists 4 but 4 does not list 1.
  spec.platforms[3].competitors = {2, 3, 4};
  spec.platforms[3].valuation.cross_weights = {{2, 1.0}, {3, 1.0}};
  EXPECT_THROW(validate_scenario(spec), AsymmetryError);
}

TEST(ValidateScenario, ZeroWeightIsParameterError) {
  auto spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[0].valuation.cross_weights[0].weight = 0.0;
  EXPECT_THROW(validate_scenario(spec), ParameterError);
  ValidationOptions lenient;
  lenient.allow_zero_weights = true;
  EXPECT_NO_THROW(validate_scenario(spec, lenient));
  spec.platforms[0].valuation.cross_weights[0].weight = -1.0;
  EXPECT_THROW(validate_scenario(spec, lenient), ParameterError);
}

TEST(ValidateScenario, BadParametersRejected) {
  auto spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[1].users = 0;
  EXPECT_THROW(validate_scenario(spec), ParameterError);

  spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[1].valuation.own_linear_cost = 0.0;
  spec.platforms[1].valuation.own_quadratic_cost = 0.0;
  EXPECT_THROW(validate_scenario(spec), ParameterError);

  spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[1].trust = {TrustFamily::kPower, 1.5};
  EXPECT_THROW(validate_scenario(spec), ParameterError);

  spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[1].trust = {TrustFamily::kComplementPower, 0.5};
  EXPECT_THROW(validate_scenario(spec), ParameterError);

  spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.government.rho = 0.0;
  EXPECT_THROW(validate_scenario(spec), ParameterError);

  spec = complete_spec({100, 100, 100}, Variant::kStandard);
  spec.platforms[2].competitors = {1, 2};
  EXPECT_THROW(validate_scenario(spec), ParameterError);  // self missing
}

TEST(Fractions, EqualCounts) {
  const auto s = validate_scenario(complete_spec({100, 100, 100}, Variant::kStandard));
  const auto n = fractions(s);
  ASSERT_EQ(n.size(), 4u);
  EXPECT_EQ(n[0], 0.0);
  for (int i = 1; i <= 3; ++i) EXPECT_NEAR(n[i], 1.0 / 3.0, 1e-15);
}

TEST(Fractions, UnequalCounts) {
  const auto s = validate_scenario(complete_spec({300, 100, 100}, Variant::kStandard));
  EXPECT_NEAR(s.fraction(1), 0.6, 1e-15);
  EXPECT_NEAR(s.fraction(2), 0.2, 1e-15);
  EXPECT_NEAR(s.fraction(3), 0.2, 1e-15);
}

TEST(Fractions, SumToOneOnRandomScenarios) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = gen_random_scenario(seed, 3 + seed % 3, Variant::kStandard);
    double sum = 0.0;
    for (PlayerId i = 1; i <= s.num_platforms(); ++i) sum += s.fraction(i);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Valuation, ZeroFiltersGiveZeroAndOwnSlopeMinusC) {
  const auto s = fixtures::tri_sym();
  const std::vector<double> zeros(4, 0.0);
  const auto e = eval_valuation(s.platform(1).valuation, 1, zeros);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_DOUBLE_EQ(e.gradient[1], -0.5);
  EXPECT_DOUBLE_EQ(e.gradient[2], 1.0);
}

TEST(Valuation, HalfwayPoint) {
  const auto s = fixtures::tri_sym();
  const std::vector<double> a{0.0, 0.5, 0.5, 0.5};
  const auto e = eval_valuation(s.platform(1).valuation, 1, a);
  EXPECT_NEAR(e.value, 2.0 * std::log(1.5) - 0.3125, 1e-15);
}

TEST(Valuation, OutOfRangeIsDomainError) {
  const auto s = fixtures::tri_sym();
  EXPECT_THROW(eval_valuation(s.platform(1).valuation, 1, std::vector<double>{0, 1.2, 0, 0}),
               DomainError);
  EXPECT_THROW(eval_valuation(s.platform(1).valuation, 1, std::vector<double>{0, 0, -0.1, 0}),
               DomainError);
}

TEST(Valuation, MatchesReferenceAndFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (ValuationFamily family :
       {ValuationFamily::kLogLinearQuadratic, ValuationFamily::kQuasiConcaveExp}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto s = gen_random_scenario(trial, 4, Variant::kStandard);
      const PlayerId owner = 1 + trial % 4;
      ValuationSpec v = s.platform(owner).valuation;
      v.family = family;
      std::vector<double> a(5);
      for (auto& x : a) x = unit(rng);
      const auto e = eval_valuation(v, owner, a);
      EXPECT_NEAR(e.value, reference_valuation(v, owner, a), 1e-12);
      for (PlayerId k : s.competitors(owner)) {
        const double fd = central_difference(
            [&](double x) {
              auto b = a;
              b[k] = x;
              return reference_valuation(v, owner, b);
            },
            a[k]);
        EXPECT_LE(relative_gap(e.gradient[k], fd), 1e-6) << "k=" << k;
        EXPECT_DOUBLE_EQ(valuation_partial(v, owner, a, k), e.gradient[k]);
      }
    }
  }
}

TEST(Valuation, SignsAndMidpointConcavity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  const auto s = gen_random_scenario(3, 5, Variant::kStandard);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(6), y(6), mid(6);
    for (int k = 0; k < 6; ++k) {
      x[k] = unit(rng);
      y[k] = unit(rng);
      mid[k] = 0.5 * (x[k] + y[k]);
    }
    for (PlayerId i = 1; i <= 5; ++i) {
      const auto& v = s.platform(i).valuation;
      const auto e = eval_valuation(v, i, x);
      EXPECT_LE(e.gradient[i], 0.0);
      for (PlayerId l : s.rivals(i)) EXPECT_GT(e.gradient[l], 0.0);
      EXPECT_GE(valuation_value(v, i, mid),
                0.5 * (valuation_value(v, i, x) + valuation_value(v, i, y)) - 1e-12);
    }
    for (double g : {0.5, 0.8, 1.0}) {
      const TrustSpec t{TrustFamily::kPower, g};
      EXPECT_GE(trust_value(t, mid[1]), 0.5 * (trust_value(t, x[1]) + trust_value(t, y[1])) - 1e-12);
    }
  }
}

TEST(Trust, Examples) {
  EXPECT_DOUBLE_EQ(trust_value({TrustFamily::kPower, 1.0}, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(trust_value({TrustFamily::kPower, 0.5}, 0.25), 0.5);
  EXPECT_EQ(trust_value({TrustFamily::kComplementPower, 2.0}, 0.0), 0.0);
  EXPECT_EQ(trust_value({TrustFamily::kComplementPower, 2.0}, 1.0), 1.0);
  EXPECT_THROW(eval_trust({TrustFamily::kPower, 1.0}, 1.01), DomainError);
  EXPECT_THROW(eval_trust({TrustFamily::kPower, 1.0}, -0.01), DomainError);
  EXPECT_TRUE(std::isinf(trust_derivative({TrustFamily::kPower, 0.5}, 0.0)));
}

TEST(Trust, DerivativesAndInverse) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.05, 0.95), gamma(0.3, 1.0), kappa(1.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const TrustSpec specs[] = {{TrustFamily::kPower, gamma(rng)},
                               {TrustFamily::kComplementPower, kappa(rng)}};
    const double a = unit(rng);
    for (const auto& t : specs) {
      const auto e = eval_trust(t, a);
      EXPECT_NEAR(e.value, reference_trust(t, a), 1e-14);
      const double fd = central_difference([&](double x) { return reference_trust(t, x); }, a);
      EXPECT_LE(relative_gap(e.derivative, fd), 1e-6);
      EXPECT_NEAR(trust_value(t, trust_inverse(t, e.value)), e.value, 1e-12);
    }
  }
}

TEST(Government, ValueAndDerivative) {
  const GovernmentSpec g{10.0, 2.0, 1.5};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = unit(rng);
    const auto e = eval_government_valuation(g, a);
    EXPECT_NEAR(e.value, 2.0 * std::log(1.0 + 1.5 * a), 1e-14);
    const double fd =
        central_difference([](double x) { return 2.0 * std::log(1.0 + 1.5 * x); }, a);
    EXPECT_LE(relative_gap(e.derivative, fd), 1e-6);
  }
}

TEST(RandomScenario, DeterministicAndSeedSensitive) {
  const auto a = gen_random_scenario(1, 3, Variant::kStandard);
  const auto b = gen_random_scenario(1, 3, Variant::kStandard);
  const auto c = gen_random_scenario(2, 3, Variant::kStandard);
  EXPECT_EQ(a.platform(1).users, b.platform(1).users);
  EXPECT_EQ(a.platform(2).valuation.own_linear_cost, b.platform(2).valuation.own_linear_cost);
  EXPECT_EQ(a.government().budget, b.government().budget);
  EXPECT_NE(a.platform(2).valuation.own_linear_cost, c.platform(2).valuation.own_linear_cost);
}

TEST(RandomScenario, RangesAndValidity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 3 + seed % 3;
    const auto s = gen_random_scenario(seed, n, Variant::kStandard);
    EXPECT_NO_THROW(validate_scenario(s.spec()));
    for (PlayerId i = 1; i <= n; ++i) {
      const auto& p = s.platform(i);
      EXPECT_GE(s.competitor_count(i), 3);
      EXPECT_GE(p.users, 50);
      EXPECT_LE(p.users, 500);
      EXPECT_GE(p.valuation.own_linear_cost, 0.1);
      EXPECT_LE(p.valuation.own_linear_cost, 1.0);
      EXPECT_GE(p.valuation.own_quadratic_cost, 0.0);
      EXPECT_LE(p.valuation.own_quadratic_cost, 0.5);
      EXPECT_GE(p.trust.exponent, 0.5);
      EXPECT_LE(p.trust.exponent, 1.0);
      for (const auto& cw : p.valuation.cross_weights) {
        EXPECT_GE(cw.weight, 0.5);
        EXPECT_LE(cw.weight, 2.0);
      }
    }
    EXPECT_GE(s.government().weight, 0.5);
    EXPECT_LE(s.government().weight, 4.0);
    EXPECT_GE(s.government().budget, 5.0);
    EXPECT_LE(s.government().budget, 50.0);
  }
  EXPECT_NO_THROW(gen_random_scenario(7, 5, Variant::kStandard));
  EXPECT_NO_THROW(gen_random_scenario(7, 2, Variant::kExtended));
  EXPECT_THROW(gen_random_scenario(7, 2, Variant::kStandard), CardinalityError);
}

TEST(Names, RoundTrip) {
  for (Variant v : {Variant::kStandard, Variant::kExtended}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  for (ValuationFamily f : {ValuationFamily::kLogLinearQuadratic, ValuationFamily::kQuasiConcaveExp}) {
    EXPECT_EQ(parse_valuation_family(to_string(f)), f);
  }
  for (TrustFamily f : {TrustFamily::kPower, TrustFamily::kComplementPower}) {
    EXPECT_EQ(parse_trust_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_variant("mixed"), ParameterError);
}

}  // namespace
}  // namespace gnemech
