// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnemech/errors.hpp"

namespace gnemech {

bool has_price_key(const Scenario& scenario, PlayerId i, PlayerId l) {
  if (l == kGovernment) return true;
  if (l == i) {
    return scenario.variant() == Variant::kExtended && scenario.competitor_count(i) == 2;
  }
  return scenario.competes(i, l);
}

std::vector<PlayerId> price_keys(const Scenario& scenario, PlayerId i) {
  std::vector<PlayerId> keys{kGovernment};
  for (PlayerId l : scenario.competitors(i)) {
    if (has_price_key(scenario, i, l)) keys.push_back(l);
  }
  return keys;
}

std::vector<PlayerId> filter_keys(const Scenario& scenario, PlayerId i) {
  std::vector<PlayerId> keys{kGovernment};
  for (PlayerId l : scenario.competitors(i)) keys.push_back(l);
  return keys;
}

MessageProfile zero_profile(const Scenario& scenario) {
  const int players = scenario.num_players();
  MessageProfile m;
  m.platforms.resize(scenario.num_platforms());
  for (auto& pm : m.platforms) {
    pm.prices.assign(players, 0.0);
    pm.filters.assign(players, 0.0);
  }
  return m;
}

void validate_profile(const MessageProfile& profile, const Scenario& scenario) {
  const int players = scenario.num_players();
  if (static_cast<int>(profile.platforms.size()) != scenario.num_platforms()) {
    throw ParameterError("profile has " + std::to_string(profile.platforms.size()) +
                         " platform messages, scenario has " +
                         std::to_string(scenario.num_platforms()));
  }
  if (!std::isfinite(profile.government.price) || profile.government.price < 0.0 ||
      !std::isfinite(profile.government.lower_bound)) {
    throw ParameterError("government message must have a finite price >= 0 and a finite bound");
  }
  for (PlayerId i = 1; i <= scenario.num_platforms(); ++i) {
    const auto& pm = profile.platform(i);
    const std::string who = "message of platform " + std::to_string(i);
    if (static_cast<int>(pm.prices.size()) != players ||
        static_cast<int>(pm.filters.size()) != players) {
      throw ParameterError(who + ": wrong vector size");
    }
    if (!std::isfinite(pm.min_trust) || pm.min_trust < 0.0) {
      throw ParameterError(who + ": proposed minimum trust must be finite and >= 0");
    }
    for (PlayerId l = 0; l < players; ++l) {
      const double p = pm.prices[l];
      if (!std::isfinite(p) || p < 0.0) throw ParameterError(who + ": negative or non-finite price");
      if (p != 0.0 && !has_price_key(scenario, i, l)) {
        throw ParameterError(who + ": price for " + std::to_string(l) + " is not a key");
      }
      const double f = pm.filters[l];
      if (!std::isfinite(f)) throw ParameterError(who + ": non-finite filter proposal");
      if (f != 0.0 && l != kGovernment && !scenario.competes(i, l)) {
        throw ParameterError(who + ": filter for " + std::to_string(l) + " is not a key");
      }
    }
  }
}

std::vector<double> allocate_filters(const MessageProfile& profile, const Scenario& scenario) {
  const int n = scenario.num_platforms();
  std::vector<double> alloc(n + 1, 0.0);
  double bound = profile.government.lower_bound;
  for (PlayerId i = 1; i <= n; ++i) {
    double s = 0.0;
    for (PlayerId k : scenario.competitors(i)) s += profile.platform(k).filters[i];
    alloc[i] = s / scenario.competitor_count(i);
    bound += profile.platform(i).filters[kGovernment];
  }
  alloc[0] = bound / scenario.num_players();
  return alloc;
}

double proposal_mean_excluding(const MessageProfile& profile, const Scenario& scenario,
                               PlayerId l, PlayerId i) {
  double s = 0.0;
  int count = 0;
  if (l == kGovernment) {
    if (i != kGovernment) {
      s += profile.government.lower_bound;
      ++count;
    }
    for (PlayerId k = 1; k <= scenario.num_platforms(); ++k) {
      if (k == i) continue;
      s += profile.platform(k).filters[kGovernment];
      ++count;
    }
  } else {
    for (PlayerId k : scenario.competitors(l)) {
      if (k == i) continue;
      s += profile.platform(k).filters[l];
      ++count;
    }
  }
  return s / count;
}

TrustQuota allocate_min_trust(const MessageProfile& profile, const Scenario& scenario,
                              double lower_bound) {
  const int n = scenario.num_platforms();
  TrustQuota q;
  q.min_trust.assign(n + 1, 0.0);
  double total = 0.0;
  for (PlayerId i = 1; i <= n; ++i) total += scenario.fraction(i) * profile.platform(i).min_trust;
  if (total <= 0.0) {
    if (std::abs(lower_bound) <= kFeasibilityTolerance) return q;
    throw DegenerateTrustError("all proposed minimum trusts are zero while the lower bound is " +
                               std::to_string(lower_bound));
  }
  for (PlayerId i = 1; i <= n; ++i) {
    const double share = scenario.fraction(i) * profile.platform(i).min_trust / total * lower_bound;
    if (share > 1.0) {
      q.min_trust[i] = 1.0;
      q.clipped = true;
    } else {
      q.min_trust[i] = share;
    }
  }
  return q;
}

TrustQuota allocate_min_trust(const MessageProfile& profile, const Scenario& scenario) {
  return allocate_min_trust(profile, scenario, allocate_filters(profile, scenario)[0]);
}

namespace {

// Mean of p_target^k over k in C_{-target} excluding `skip`, i.e. |C_target| - 2 entries.
double leave_one_out_price(const MessageProfile& profile, const Scenario& scenario,
                           PlayerId target, PlayerId skip) {
  double s = 0.0;
  for (PlayerId k : scenario.rivals(target)) {
    if (k != skip) s += profile.platform(k).prices[target];
  }
  return s / (scenario.competitor_count(target) - 2);
}

}  // namespace

PriceAllocation allocate_prices(const MessageProfile& profile, const Scenario& scenario) {
  const int n = scenario.num_platforms();
  const bool extended = scenario.variant() == Variant::kExtended;
  PriceAllocation out{PriceTable(n + 1), PriceTable(n + 1), 0.0};
  for (PlayerId i = 1; i <= n; ++i) {
    const bool pair_i = scenario.competitor_count(i) == 2;
    if (pair_i && !extended) {
      throw VariantError("standard variant cannot price a platform with |C| = 2");
    }
    for (PlayerId l : scenario.rivals(i)) {
      const bool pair_l = scenario.competitor_count(l) == 2;
      out.payment(i, l) = pair_l ? profile.platform(l).prices[l]
                                 : leave_one_out_price(profile, scenario, l, i);
      // In the standard variant this is the payment l makes for i's filter.
      out.subsidy(i, l) = pair_i ? profile.platform(l).prices[i]
                                 : leave_one_out_price(profile, scenario, i, l);
    }
    out.government_price += profile.platform(i).prices[kGovernment];
  }
  out.government_price /= n;
  return out;
}

namespace {

double square(double x) { return x * x; }

}  // namespace

double platform_tax_with(const MessageProfile& profile, const Scenario& scenario, PlayerId i,
                         std::span<const double> alloc, std::span<const double> min_trust,
                         const PriceAllocation& prices) {
  const auto& own = profile.platform(i);
  const bool extended = scenario.variant() == Variant::kExtended;
  double tax = -profile.government.price * min_trust[i];
  for (PlayerId l : scenario.rivals(i)) {
    tax -= prices.subsidy(i, l) * alloc[i];
    tax += prices.payment(i, l) * alloc[l];
  }
  for (PlayerId l : scenario.rivals(i)) {
    tax += own.prices[l] * square(own.filters[l] - proposal_mean_excluding(profile, scenario, l, i));
  }
  tax += own.prices[kGovernment] *
         square(own.filters[kGovernment] -
                proposal_mean_excluding(profile, scenario, kGovernment, i));
  if (extended) {
    const bool pair_i = scenario.competitor_count(i) == 2;
    for (PlayerId l : scenario.rivals(i)) {
      if (pair_i) tax += square(own.prices[i] - profile.platform(l).prices[i]);
      if (scenario.competitor_count(l) == 2) {
        tax += square(own.prices[l] - profile.platform(l).prices[l]);
      }
    }
  }
  return tax;
}

namespace {

double government_tax_from(const MessageProfile& profile, double lower_bound,
                           double government_price) {
  return government_price * lower_bound + square(profile.government.price - government_price);
}

}  // namespace

double platform_tax(const MessageProfile& profile, const Scenario& scenario, PlayerId i) {
  const auto alloc = allocate_filters(profile, scenario);
  const auto quota = allocate_min_trust(profile, scenario, alloc[0]);
  const auto prices = allocate_prices(profile, scenario);
  return platform_tax_with(profile, scenario, i, alloc, quota.min_trust, prices);
}

double government_tax(const MessageProfile& profile, const Scenario& scenario) {
  const auto alloc = allocate_filters(profile, scenario);
  const auto prices = allocate_prices(profile, scenario);
  return government_tax_from(profile, alloc[0], prices.government_price);
}

Outcome outcome(const MessageProfile& profile, const Scenario& scenario) {
  const int n = scenario.num_platforms();
  Outcome out;
  out.allocation = allocate_filters(profile, scenario);
  auto quota = allocate_min_trust(profile, scenario, out.allocation[0]);
  out.min_trust = std::move(quota.min_trust);
  out.quota_clipped = quota.clipped;
  auto prices = allocate_prices(profile, scenario);
  out.government_price = prices.government_price;
  out.taxes.assign(n + 1, 0.0);
  out.feasible.assign(n + 1, false);
  for (PlayerId i = 1; i <= n; ++i) {
    out.taxes[i] = platform_tax_with(profile, scenario, i, out.allocation, out.min_trust, prices);
    const double a = out.allocation[i];
    if (a >= -kFeasibilityTolerance && a <= 1.0 + kFeasibilityTolerance) {
      const double supply =
          scenario.fraction(i) * trust_value(scenario.platform(i).trust, std::clamp(a, 0.0, 1.0));
      out.feasible[i] = supply >= out.min_trust[i] - kSupplyTolerance;
    }
  }
  out.taxes[0] = government_tax_from(profile, out.allocation[0], out.government_price);
  const double a0 = out.allocation[0];
  out.feasible[0] = a0 >= -kFeasibilityTolerance && a0 <= 1.0 + kFeasibilityTolerance &&
                    out.government_price * a0 <= scenario.government().budget + kSupplyTolerance;
  out.payment = std::move(prices.payment);
  out.subsidy = std::move(prices.subsidy);
  return out;
}

std::vector<double> snap_to_box(std::vector<double> allocation) {
  for (double& a : allocation) {
    if (a < 0.0 && a >= -kFeasibilityTolerance) a = 0.0;
    if (a > 1.0 && a <= 1.0 + kFeasibilityTolerance) a = 1.0;
  }
  return allocation;
}

double utility(const Scenario& scenario, const Outcome& outcome, PlayerId player) {
  if (!outcome.feasible[player]) {
    throw InfeasibleAllocationError("allocation infeasible for player " + std::to_string(player));
  }
  const auto alloc = snap_to_box(outcome.allocation);
  if (player == kGovernment) {
    return eval_government_valuation(scenario.government(), alloc[0]).value - outcome.taxes[0];
  }
  const auto& spec = scenario.platform(player).valuation;
  return eval_valuation(spec, player, alloc).value - outcome.taxes[player];
}

double utility_or_neg_inf(const Scenario& scenario, const Outcome& outcome, PlayerId player) {
  if (!outcome.feasible[player]) return -std::numeric_limits<double>::infinity();
  try {
    return utility(scenario, outcome, player);
  } catch (const DomainError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace gnemech
