// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "gnemech/errors.hpp"

namespace gnemech {

std::string to_string(Variant v) {
  return v == Variant::kStandard ? "standard" : "extended";
}

std::string to_string(ValuationFamily f) {
  return f == ValuationFamily::kLogLinearQuadratic ? "log_linear_quadratic" : "quasi_concave_exp";
}

std::string to_string(TrustFamily f) {
  return f == TrustFamily::kPower ? "power" : "complement_power";
}

Variant parse_variant(const std::string& s) {
  if (s == "standard") return Variant::kStandard;
  if (s == "extended") return Variant::kExtended;
  throw ParameterError("unknown variant '" + s + "'");
}

ValuationFamily parse_valuation_family(const std::string& s) {
  if (s == "log_linear_quadratic") return ValuationFamily::kLogLinearQuadratic;
  if (s == "quasi_concave_exp") return ValuationFamily::kQuasiConcaveExp;
  throw ParameterError("unknown valuation family '" + s + "'");
}

TrustFamily parse_trust_family(const std::string& s) {
  if (s == "power") return TrustFamily::kPower;
  if (s == "complement_power") return TrustFamily::kComplementPower;
  throw ParameterError("unknown trust family '" + s + "'");
}

double ValuationSpec::weight_of(PlayerId l) const {
  for (const auto& cw : cross_weights) {
    if (cw.id == l) return cw.weight;
  }
  return 0.0;
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) {
  const int n = num_platforms();
  fractions_.assign(n + 1, 0.0);
  double total = 0.0;
  for (const auto& p : spec_.platforms) total += static_cast<double>(p.users);
  for (const auto& p : spec_.platforms) fractions_[p.id] = static_cast<double>(p.users) / total;
  rivals_.assign(n + 1, {});
  for (const auto& p : spec_.platforms) {
    for (PlayerId k : p.competitors) {
      if (k != p.id) rivals_[p.id].push_back(k);
    }
  }
}

bool Scenario::competes(PlayerId i, PlayerId l) const {
  const auto& c = platform(i).competitors;
  return std::binary_search(c.begin(), c.end(), l);
}

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void check_platform_params(const PlatformSpec& p, const ValidationOptions& options) {
  const std::string who = "platform " + std::to_string(p.id);
  if (p.users < 1) throw ParameterError(who + ": users must be >= 1");
  const auto& v = p.valuation;
  if (!finite_nonneg(v.own_linear_cost) || !finite_nonneg(v.own_quadratic_cost)) {
    throw ParameterError(who + ": own costs must be finite and >= 0");
  }
  if (!(v.own_linear_cost + v.own_quadratic_cost > 0.0)) {
    throw ParameterError(who + ": own_linear_cost + own_quadratic_cost must be > 0");
  }
  std::set<PlayerId> seen;
  for (const auto& cw : v.cross_weights) {
    if (cw.id == p.id || !std::binary_search(p.competitors.begin(), p.competitors.end(), cw.id)) {
      throw ParameterError(who + ": cross weight for non-competitor " + std::to_string(cw.id));
    }
    if (!seen.insert(cw.id).second) {
      throw ParameterError(who + ": duplicate cross weight for " + std::to_string(cw.id));
    }
    const bool ok = options.allow_zero_weights ? finite_nonneg(cw.weight)
                                               : (std::isfinite(cw.weight) && cw.weight > 0.0);
    if (!ok) throw ParameterError(who + ": cross weight for " + std::to_string(cw.id) + " must be > 0");
  }
  for (PlayerId k : p.competitors) {
    if (k != p.id && !seen.count(k)) {
      if (!options.allow_zero_weights) {
        throw ParameterError(who + ": missing cross weight for competitor " + std::to_string(k));
      }
    }
  }
  const auto& t = p.trust;
  if (!std::isfinite(t.exponent)) throw ParameterError(who + ": trust exponent must be finite");
  if (t.family == TrustFamily::kPower && !(t.exponent > 0.0 && t.exponent <= 1.0)) {
    throw ParameterError(who + ": power trust exponent must lie in (0, 1]");
  }
  if (t.family == TrustFamily::kComplementPower && !(t.exponent >= 1.0)) {
    throw ParameterError(who + ": complement_power trust exponent must be >= 1");
  }
}

}  // namespace

Scenario validate_scenario(ScenarioSpec raw, const ValidationOptions& options) {
  if (raw.platforms.empty()) throw CardinalityError("scenario has no platforms");
  std::sort(raw.platforms.begin(), raw.platforms.end(),
            [](const PlatformSpec& a, const PlatformSpec& b) { return a.id < b.id; });
  const int n = static_cast<int>(raw.platforms.size());
  for (int k = 0; k < n; ++k) {
    if (raw.platforms[k].id != k + 1) {
      throw ParameterError("platform ids must be exactly 1.." + std::to_string(n));
    }
  }
  const std::size_t min_size = raw.variant == Variant::kStandard ? 3 : 2;
  for (auto& p : raw.platforms) {
    auto& c = p.competitors;
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
      throw ParameterError("platform " + std::to_string(p.id) + ": duplicate competitor");
    }
    for (PlayerId k : c) {
      if (k < 1 || k > n) {
        throw ParameterError("platform " + std::to_string(p.id) + ": unknown competitor " +
                             std::to_string(k));
      }
    }
    if (!std::binary_search(c.begin(), c.end(), p.id)) {
      throw ParameterError("platform " + std::to_string(p.id) + ": competitors must include self");
    }
    if (c.size() < min_size) {
      throw CardinalityError("platform " + std::to_string(p.id) + " has |C| = " +
                             std::to_string(c.size()) + ", " + to_string(raw.variant) +
                             " variant requires >= " + std::to_string(min_size));
    }
    std::sort(p.valuation.cross_weights.begin(), p.valuation.cross_weights.end(),
              [](const CrossWeight& a, const CrossWeight& b) { return a.id < b.id; });
  }
  for (const auto& p : raw.platforms) {
    for (PlayerId k : p.competitors) {
      const auto& ck = raw.platforms[k - 1].competitors;
      if (!std::binary_search(ck.begin(), ck.end(), p.id)) {
        throw AsymmetryError(std::to_string(k) + " in C_" + std::to_string(p.id) + " but " +
                             std::to_string(p.id) + " not in C_" + std::to_string(k));
      }
    }
  }
  for (auto& p : raw.platforms) {
    check_platform_params(p, options);
    // Zero weights for unlisted competitors are materialized so lookups stay uniform.
    for (PlayerId k : p.competitors) {
      if (k != p.id && std::none_of(p.valuation.cross_weights.begin(),
                                    p.valuation.cross_weights.end(),
                                    [k](const CrossWeight& cw) { return cw.id == k; })) {
        p.valuation.cross_weights.push_back({k, 0.0});
      }
    }
    std::sort(p.valuation.cross_weights.begin(), p.valuation.cross_weights.end(),
              [](const CrossWeight& a, const CrossWeight& b) { return a.id < b.id; });
  }
  const auto& g = raw.government;
  if (!finite_nonneg(g.budget)) throw ParameterError("government budget must be >= 0");
  if (!finite_nonneg(g.weight)) throw ParameterError("government weight must be >= 0");
  if (!(std::isfinite(g.rho) && g.rho > 0.0)) throw ParameterError("government rho must be > 0");
  return Scenario(std::move(raw));
}

std::vector<double> fractions(const Scenario& scenario) { return scenario.fractions(); }

namespace {

void check_unit(double a, const char* what) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw DomainError(std::string(what) + " " + std::to_string(a) + " outside [0,1]");
  }
}

double base_value(const ValuationSpec& spec, PlayerId owner, std::span<const double> alloc) {
  double s = 0.0;
  for (const auto& cw : spec.cross_weights) s += cw.weight * std::log1p(alloc[cw.id]);
  const double a = alloc[owner];
  return s - spec.own_linear_cost * a - spec.own_quadratic_cost * a * a;
}

double base_partial(const ValuationSpec& spec, PlayerId owner, std::span<const double> alloc,
                    PlayerId k) {
  if (k == owner) return -spec.own_linear_cost - 2.0 * spec.own_quadratic_cost * alloc[owner];
  return spec.weight_of(k) / (1.0 + alloc[k]);
}

}  // namespace

double valuation_value(const ValuationSpec& spec, PlayerId owner, std::span<const double> alloc) {
  const double b = base_value(spec, owner, alloc);
  return spec.family == ValuationFamily::kLogLinearQuadratic ? b : std::expm1(b);
}

double valuation_partial(const ValuationSpec& spec, PlayerId owner,
                         std::span<const double> alloc, PlayerId k) {
  const double d = base_partial(spec, owner, alloc, k);
  if (spec.family == ValuationFamily::kLogLinearQuadratic) return d;
  return std::exp(base_value(spec, owner, alloc)) * d;
}

ValuationEval eval_valuation(const ValuationSpec& spec, PlayerId owner,
                             std::span<const double> alloc) {
  check_unit(alloc[owner], "filter");
  for (const auto& cw : spec.cross_weights) check_unit(alloc[cw.id], "filter");
  ValuationEval out;
  out.gradient.assign(alloc.size(), 0.0);
  const double b = base_value(spec, owner, alloc);
  const double scale = spec.family == ValuationFamily::kLogLinearQuadratic ? 1.0 : std::exp(b);
  out.value = spec.family == ValuationFamily::kLogLinearQuadratic ? b : std::expm1(b);
  out.gradient[owner] = scale * base_partial(spec, owner, alloc, owner);
  for (const auto& cw : spec.cross_weights) {
    out.gradient[cw.id] = scale * cw.weight / (1.0 + alloc[cw.id]);
  }
  return out;
}

double trust_value(const TrustSpec& spec, double a) {
  if (spec.family == TrustFamily::kPower) {
    return spec.exponent == 1.0 ? a : std::pow(a, spec.exponent);
  }
  return 1.0 - std::pow(1.0 - a, spec.exponent);
}

double trust_derivative(const TrustSpec& spec, double a) {
  if (spec.family == TrustFamily::kPower) {
    if (spec.exponent == 1.0) return 1.0;
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    return spec.exponent * std::pow(a, spec.exponent - 1.0);
  }
  if (spec.exponent == 1.0) return 1.0;
  return spec.exponent * std::pow(1.0 - a, spec.exponent - 1.0);
}

TrustEval eval_trust(const TrustSpec& spec, double a) {
  check_unit(a, "filter");
  return {trust_value(spec, a), trust_derivative(spec, a)};
}

double trust_inverse(const TrustSpec& spec, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  double a;
  if (spec.family == TrustFamily::kPower) {
    a = spec.exponent == 1.0 ? y : std::pow(y, 1.0 / spec.exponent);
  } else {
    a = 1.0 - std::pow(1.0 - y, 1.0 / spec.exponent);
  }
  a = std::clamp(a, 0.0, 1.0);
  // Round-trip can land one ulp short; nudge up until h(a) >= y.
  for (int k = 0; k < 4 && trust_value(spec, a) < y && a < 1.0; ++k) {
    a = std::nextafter(a, 2.0);
  }
  return a;
}

double government_value(const GovernmentSpec& spec, double a0) {
  return spec.weight * std::log1p(spec.rho * a0);
}

GovernmentEval eval_government_valuation(const GovernmentSpec& spec, double a0) {
  check_unit(a0, "lower bound");
  return {government_value(spec, a0), spec.weight * spec.rho / (1.0 + spec.rho * a0)};
}

namespace {

std::vector<std::set<PlayerId>> random_graph(std::mt19937_64& rng, int n, Variant variant) {
  std::vector<std::set<PlayerId>> adj(n + 1);
  auto link = [&](int a, int b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  std::bernoulli_distribution chord(0.5);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  if (variant == Variant::kStandard) {
    for (int k = 0; k < n; ++k) link(order[k], order[(k + 1) % n]);
  } else {
    for (int k = 1; k < n; ++k) {
      std::uniform_int_distribution<int> parent(0, k - 1);
      link(order[k], order[parent(rng)]);
    }
  }
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (!adj[a].count(b) && chord(rng)) link(a, b);
    }
  }
  return adj;
}

}  // namespace

Scenario gen_random_scenario(std::uint64_t seed, int num_platforms, Variant variant) {
  const int min_n = variant == Variant::kStandard ? 3 : 2;
  if (num_platforms < min_n) {
    throw CardinalityError("random scenario needs at least " + std::to_string(min_n) +
                           " platforms for the " + to_string(variant) + " variant");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 2.0), lin(0.1, 1.0), quad(0.0, 0.5),
      gamma(0.5, 1.0), w0(0.5, 4.0), budget(5.0, 50.0);
  std::uniform_int_distribution<std::int64_t> users(50, 500);

  const int n = num_platforms;
  auto adj = random_graph(rng, n, variant);
  ScenarioSpec spec;
  spec.variant = variant;
  spec.platforms.resize(n);
  for (int i = 1; i <= n; ++i) {
    auto& p = spec.platforms[i - 1];
    p.id = i;
    p.users = users(rng);
    p.competitors.assign(adj[i].begin(), adj[i].end());
    p.competitors.push_back(i);
    std::sort(p.competitors.begin(), p.competitors.end());
    p.valuation.own_linear_cost = lin(rng);
    p.valuation.own_quadratic_cost = quad(rng);
    p.trust.family = TrustFamily::kPower;
    p.trust.exponent = gamma(rng);
  }
  // Incoming weights on each filter are drawn jointly and redrawn until every
  // weight is at most the sum of the others scaled by 1/(m-1), which keeps the
  // equilibrium price proposals nonnegative.
  std::vector<std::vector<double>> w(n + 1, std::vector<double>(n + 1, 0.0));
  for (int l = 1; l <= n; ++l) {
    std::vector<int> in(adj[l].begin(), adj[l].end());
    const double m = static_cast<double>(in.size());
    for (;;) {
      double sum = 0.0, mx = 0.0;
      for (int x : in) {
        w[x][l] = weight(rng);
        sum += w[x][l];
        mx = std::max(mx, w[x][l]);
      }
      if ((m - 1.0) * mx <= sum) break;
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int l : adj[i]) spec.platforms[i - 1].valuation.cross_weights.push_back({l, w[i][l]});
  }
  spec.government.weight = w0(rng);
  spec.government.rho = 1.0;
  spec.government.budget = budget(rng);
  return validate_scenario(std::move(spec));
}

}  // namespace gnemech
