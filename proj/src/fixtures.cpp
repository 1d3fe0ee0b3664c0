// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/fixtures.hpp"

#include "gnemech/errors.hpp"

namespace gnemech::fixtures {

namespace {

ScenarioSpec symmetric_triple(ValuationFamily family, double weight) {
  ScenarioSpec spec;
  for (PlayerId i = 1; i <= 3; ++i) {
    PlatformSpec p;
    p.id = i;
    p.users = 100;
    p.competitors = {1, 2, 3};
    p.valuation.family = family;
    for (PlayerId l = 1; l <= 3; ++l) {
      if (l != i) p.valuation.cross_weights.push_back({l, weight});
    }
    p.valuation.own_linear_cost = 0.5;
    p.valuation.own_quadratic_cost = 0.25;
    p.trust = {TrustFamily::kPower, 1.0};
    spec.platforms.push_back(p);
  }
  spec.government = {10.0, 2.0, 1.0};
  return spec;
}

}  // namespace

Scenario tri_sym(Variant variant) {
  auto spec = symmetric_triple(ValuationFamily::kLogLinearQuadratic, 1.0);
  spec.variant = variant;
  return validate_scenario(std::move(spec));
}

Scenario tri_sym_quasi() {
  return validate_scenario(symmetric_triple(ValuationFamily::kQuasiConcaveExp, 1.0));
}

Scenario duo_extended() {
  ScenarioSpec spec;
  spec.variant = Variant::kExtended;
  const std::int64_t users[] = {200, 100};
  const double weight[] = {1.2, 0.9};
  const double trust[] = {1.0, 0.8};
  for (PlayerId i = 1; i <= 2; ++i) {
    PlatformSpec p;
    p.id = i;
    p.users = users[i - 1];
    p.competitors = {1, 2};
    p.valuation.cross_weights = {{3 - i, weight[i - 1]}};
    p.valuation.own_linear_cost = 0.3;
    p.valuation.own_quadratic_cost = 0.2;
    p.trust = {TrustFamily::kPower, trust[i - 1]};
    spec.platforms.push_back(p);
  }
  spec.government = {10.0, 1.5, 1.0};
  return validate_scenario(std::move(spec));
}

Scenario zero_benefit() {
  auto spec = symmetric_triple(ValuationFamily::kLogLinearQuadratic, 0.0);
  spec.government.weight = 0.0;
  ValidationOptions options;
  options.allow_zero_weights = true;
  return validate_scenario(std::move(spec), options);
}

std::vector<std::string> builtin_names() {
  return {"tri-sym", "tri-sym-quasi", "duo-extended", "zero-benefit"};
}

Scenario builtin(const std::string& name) {
  if (name == "tri-sym") return tri_sym();
  if (name == "tri-sym-quasi") return tri_sym_quasi();
  if (name == "duo-extended") return duo_extended();
  if (name == "zero-benefit") return zero_benefit();
  throw IOError("unknown builtin scenario '" + name + "'");
}

}  // namespace gnemech::fixtures
