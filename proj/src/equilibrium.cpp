// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <utility>

#include "gnemech/errors.hpp"

namespace gnemech {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Quota shares are realized through h-proposals; a share of exactly 1 would
// need an infinite proposal.
constexpr double kMaxShare = 1.0 - 1e-12;
// The dynamics keep the bound this far below the proposed trust supply so that
// quotas stay feasible while messages are still settling.
constexpr double kBoundSlack = 1e-9;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::vector<double> clamp_box(std::vector<double> a) {
  for (double& x : a) x = clamp01(x);
  return a;
}

// Maximizes phi on [lo, hi] given its derivative. Brackets sign changes of the
// derivative on a coarse grid, bisects each to machine precision and keeps the
// best candidate. Among near-ties `preferred` wins only if it is stationary,
// which keeps flat coordinates still without stalling next to a corner.
template <class Phi, class DPhi>
double maximize_1d(Phi&& phi, DPhi&& dphi, double lo, double hi, double preferred) {
  preferred = std::clamp(preferred, lo, hi);
  if (hi <= lo) return lo;
  constexpr int kCells = 32;
  std::vector<double> cand{lo, hi};
  double x_prev = lo;
  double d_prev = dphi(lo);
  for (int j = 1; j <= kCells; ++j) {
    const double x = j == kCells ? hi : lo + (hi - lo) * j / kCells;
    const double d = dphi(x);
    if (d_prev > 0.0 && !(d > 0.0)) {
      double a = x_prev, b = x;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if (dphi(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      cand.push_back(phi(a) >= phi(b) ? a : b);
    }
    x_prev = x;
    d_prev = d;
  }
  double best_x = cand[0];
  double best = phi(best_x);
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const double v = phi(cand[k]);
    if (v > best) {
      best = v;
      best_x = cand[k];
    }
  }
  const double v_pref = phi(preferred);
  if (v_pref >= best - 1e-15 * (1.0 + std::abs(best))) {
    const double d = dphi(preferred);
    const bool stationary = std::abs(d) <= 1e-12 || (preferred == lo && d < 0.0) ||
                            (preferred == hi && d > 0.0);
    if (stationary || v_pref > best) return preferred;
  }
  return best_x;
}

// Lower-bound choice of a platform whose trust proposal is truthful. With
// supply s = n_i h(x) and the others proposing o, its quota is a0 * s / (s + o),
// which stays within s as long as a0 <= s + o.
struct BoundChoice {
  double bound_target;
  double quota;
  double value;
  double slope;  // d value / d s
  bool shaded = false;  // quota below the truthful share
};

struct BoundProblem {
  double gov_price;      // government's proposed price, paid per unit of quota
  double penalty;        // own lower-bound price times |J|^2
  double others_mean;    // mean of the other lower-bound proposals
  double others_supply;  // sum over k != i of n_k times proposed trust
  double current_supply;  // sum of n_k h_k at the current allocation
  double lo = 0.0, hi = 1.0;  // reachable bounds

  BoundChoice choose(double s) const {
    const double p = gov_price, P = penalty, abar = others_mean, o = others_supply;
    const double total = s + o;
    const double cap = std::clamp(std::min(total, current_supply) - kBoundSlack, 0.0, 1.0);
    const double ratio = total > 0.0 ? s / total : 0.0;
    const double dratio = total > 0.0 ? o / (total * total) : 0.0;
    BoundChoice c{};
    double t;
    if (P > 0.0) {
      t = std::clamp(abar + p * ratio / (2.0 * P), 0.0, cap);
    } else {
      t = p > 0.0 ? cap : std::clamp(abar, 0.0, cap);
    }
    const bool at_supply = t == cap && cap < 1.0 && cap > 0.0 && total <= current_supply;
    t = std::clamp(t, lo, hi);
    c.bound_target = t;
    c.quota = t * ratio;
    // The others can hold the bound above what a truthful proposal supports;
    // the quota is then shaded down to the platform's own supply.
    c.shaded = o > 0.0 && c.quota > s - kBoundSlack;
    if (c.shaded) c.quota = std::max(0.0, s - kBoundSlack);
    c.value = p * c.quota - P * (t - abar) * (t - abar);
    if (c.shaded) {
      c.slope = p;
      return c;
    }
    // Envelope slope; only the binding supply cap moves the bound with s.
    c.slope = p * t * dratio;
    if (at_supply && t == cap) {
      c.slope += p * ratio - 2.0 * P * (t - abar);
    }
    return c;
  }
};

struct PlatformView {
  const Scenario& s;
  PlayerId i;
  std::vector<double> alloc;  // current allocation, clamped to the box
  PriceAllocation prices;
  std::vector<double> own_prices;
  std::vector<double> others_mean;  // by id; index 0 is the lower bound
  // Targets reachable with a proposal in [0,1], by id; index 0 is the lower bound.
  std::vector<std::pair<double, double>> reach;
  double subsidy_total = 0.0;
  double others_supply = 0.0;  // sum over k != i of n_k * proposed trust

  PlatformView(const Scenario& sc, PlayerId id, const MessageProfile& m)
      : s(sc), i(id), alloc(clamp_box(allocate_filters(m, sc))), prices(allocate_prices(m, sc)) {
    const int players = s.num_players();
    for (PlayerId l : s.rivals(i)) subsidy_total += prices.subsidy(i, l);
    for (PlayerId k = 1; k <= s.num_platforms(); ++k) {
      if (k != i) others_supply += s.fraction(k) * m.platform(k).min_trust;
    }
    others_mean.assign(players, 0.0);
    others_mean[0] = proposal_mean_excluding(m, s, kGovernment, i);
    for (PlayerId l : s.rivals(i)) others_mean[l] = proposal_mean_excluding(m, s, l, i);
    reach.assign(players, {0.0, 1.0});
    auto span = [](double others, double count) {
      const double lo = std::clamp(others / count, 0.0, 1.0);
      return std::pair{lo, std::clamp((1.0 + others) / count, lo, 1.0)};
    };
    for (PlayerId k : s.competitors(i)) {
      const double count = s.competitor_count(k);
      reach[k] = span(proposal_mean_excluding(m, s, k, i) * (count - 1.0), count);
    }
    const double players_d = players;
    reach[0] = span(others_mean[0] * (players_d - 1.0), players_d);

    const auto& v = s.platform(i).valuation;
    own_prices.assign(players, 0.0);
    for (PlayerId l : s.rivals(i)) own_prices[l] = std::max(0.0, valuation_partial(v, i, alloc, l));
    if (has_price_key(s, i, i)) {
      double sum = 0.0;
      for (PlayerId l : s.rivals(i)) sum += m.platform(l).prices[i];
      own_prices[i] = sum / static_cast<double>(s.rivals(i).size());
    }
    own_prices[0] = lower_bound_price(m.government.price);
  }

  // Marginal cost of meeting the quota share the current allocation implies.
  double lower_bound_price(double gov_price) const {
    const double n_i = s.fraction(i);
    const auto& trust = s.platform(i).trust;
    double supply = 0.0;
    for (PlayerId k = 1; k <= s.num_platforms(); ++k) {
      supply += s.fraction(k) * trust_value(s.platform(k).trust, alloc[k]);
    }
    const double share = supply > 0.0 ? alloc[0] * n_i * trust_value(trust, alloc[i]) / supply
                                      : alloc[0] * n_i;
    const double level = share / n_i;
    const double needed = trust_inverse(trust, std::min(1.0, level));
    auto at = alloc;
    at[i] = needed;
    const double marginal = valuation_partial(s.platform(i).valuation, i, at, i) + subsidy_total;
    const double slope = trust_derivative(trust, needed);
    const double mc = std::isinf(slope) ? 0.0 : -marginal / (n_i * slope);
    if (level >= 1.0) return std::max({mc, gov_price, 0.0});
    if (share <= 0.0) return std::min(std::max(0.0, mc), gov_price);
    return std::max(0.0, mc);
  }

  BoundProblem bound_problem(const MessageProfile& m) const {
    const double players = s.num_players();
    double current = 0.0;
    for (PlayerId k = 1; k <= s.num_platforms(); ++k) {
      current += s.fraction(k) * trust_value(s.platform(k).trust, alloc[k]);
    }
    return {m.government.price, own_prices[0] * players * players, others_mean[0], others_supply,
            current, reach[0].first, reach[0].second};
  }
};

}  // namespace

std::string to_string(EquilibriumMethod m) {
  return m == EquilibriumMethod::kConstructed ? "constructed" : "dynamics";
}

double invert_proposal(const MessageProfile& profile, const Scenario& scenario, PlayerId k,
                       PlayerId i, double target) {
  double others = 0.0;
  double count = 0.0;
  if (k == kGovernment) {
    count = scenario.num_players();
    if (i != kGovernment) others = profile.government.lower_bound;
    for (PlayerId l = 1; l <= scenario.num_platforms(); ++l) {
      if (l != i) others += profile.platform(l).filters[kGovernment];
    }
  } else {
    count = scenario.competitor_count(k);
    for (PlayerId l : scenario.competitors(k)) {
      if (l != i) others += profile.platform(l).filters[k];
    }
  }
  return count * target - others;
}

MessageProfile construct_gne(const Scenario& scenario, const CentralizedSolution& centralized) {
  const int n = scenario.num_platforms();
  const auto& a = centralized.actions;
  if (static_cast<int>(a.size()) != n + 1) throw ConstructionError("solution has wrong size");
  const double nu = centralized.trust_multiplier;
  MessageProfile m = zero_profile(scenario);
  m.government.price = nu;
  m.government.lower_bound = a[0];
  for (PlayerId i = 1; i <= n; ++i) {
    auto& pm = m.platform(i);
    pm.min_trust = trust_value(scenario.platform(i).trust, a[i]);
    pm.filters[0] = a[0];
    for (PlayerId k : scenario.competitors(i)) pm.filters[k] = a[k];
    pm.prices[0] = nu;
  }
  for (PlayerId l = 1; l <= n; ++l) {
    const auto rivals = scenario.rivals(l);
    const int size = scenario.competitor_count(l);
    if (size == 2) {
      if (scenario.variant() == Variant::kStandard) {
        throw ConstructionError("platform " + std::to_string(l) + " has |C| = 2 in the standard variant");
      }
      const PlayerId other = rivals[0];
      const double d = valuation_partial(scenario.platform(other).valuation, other, a, l);
      if (d < 0.0) throw ConstructionError("negative marginal valuation for filter " + std::to_string(l));
      m.platform(other).prices[l] = d;
      m.platform(l).prices[l] = d;
      continue;
    }
    // Proposals p_x solving (sum_y p_y - p_x) / (m - 1) = d_x for every proposer x.
    const double count = static_cast<double>(rivals.size());
    std::vector<double> d;
    double total = 0.0;
    for (PlayerId x : rivals) {
      d.push_back(valuation_partial(scenario.platform(x).valuation, x, a, l));
      total += d.back();
    }
    for (std::size_t j = 0; j < rivals.size(); ++j) {
      const double p = total - (count - 1.0) * d[j];
      if (p < 0.0) {
        throw ConstructionError("price proposal for filter " + std::to_string(l) + " by platform " +
                                std::to_string(rivals[j]) + " would be negative (" +
                                std::to_string(p) + ")");
      }
      m.platform(rivals[j]).prices[l] = p;
    }
  }
  return m;
}

ReducedAction best_reduced_action(const Scenario& scenario, PlayerId i,
                                  const MessageProfile& profile) {
  const PlatformView view(scenario, i, profile);
  const auto& v = scenario.platform(i).valuation;
  const auto& trust = scenario.platform(i).trust;
  const double n_i = scenario.fraction(i);
  const BoundProblem qp = view.bound_problem(profile);

  std::vector<double> t = view.alloc;
  auto own_phi = [&](double x) {
    t[i] = x;
    return valuation_value(v, i, t) + view.subsidy_total * x +
           qp.choose(n_i * trust_value(trust, x)).value;
  };
  auto own_dphi = [&](double x) {
    t[i] = x;
    const double slope = qp.choose(n_i * trust_value(trust, x)).slope;
    double d = valuation_partial(v, i, t, i) + view.subsidy_total;
    if (slope != 0.0) d += slope * n_i * trust_derivative(trust, x);
    return d;
  };
  const bool separable = v.family == ValuationFamily::kLogLinearQuadratic;
  for (int pass = 0; pass < 500; ++pass) {
    double change = 0.0;
    for (PlayerId k : scenario.competitors(i)) {
      const double before = t[k];
      const auto [lo, hi] = view.reach[k];
      if (k == i) {
        t[i] = maximize_1d(own_phi, own_dphi, lo, hi, before);
      } else {
        const double size = scenario.competitor_count(k);
        const double P = view.own_prices[k] * size * size;
        const double pi = view.prices.payment(i, k);
        const double abar = view.others_mean[k];
        auto phi = [&](double x) {
          t[k] = x;
          return valuation_value(v, i, t) - pi * x - P * (x - abar) * (x - abar);
        };
        auto dphi = [&](double x) {
          t[k] = x;
          return valuation_partial(v, i, t, k) - pi - 2.0 * P * (x - abar);
        };
        t[k] = maximize_1d(phi, dphi, lo, hi, before);
      }
      change = std::max(change, std::abs(t[k] - before));
    }
    if (separable || change <= 1e-15) break;
  }
  const BoundChoice q = qp.choose(n_i * trust_value(trust, t[i]));
  ReducedAction ra;
  ra.filters.assign(scenario.num_players(), 0.0);
  for (PlayerId k : scenario.competitors(i)) ra.filters[k] = t[k];
  ra.lower_bound_target = q.bound_target;
  ra.min_trust = q.quota;
  return ra;
}

namespace {

// Trust proposal that realizes `quota` when the bound lands on `bound`.
double trust_proposal_for(const Scenario& s, PlayerId i, double quota, double bound,
                          double others_supply, double own_filter) {
  const double truthful = trust_value(s.platform(i).trust, clamp01(own_filter));
  if (others_supply <= 0.0) return truthful;
  if (quota <= 0.0 || bound <= 0.0) return 0.0;
  const double share = std::min(quota / bound, kMaxShare);
  const double needed = share / (1.0 - share) * others_supply / s.fraction(i);
  return needed;
}

}  // namespace

PlatformMessage best_response_platform(const Scenario& scenario, PlayerId i,
                                       const MessageProfile& profile) {
  const PlatformView view(scenario, i, profile);
  const ReducedAction ra = best_reduced_action(scenario, i, profile);
  PlatformMessage pm;
  pm.prices = view.own_prices;
  pm.filters.assign(scenario.num_players(), 0.0);
  for (PlayerId k : scenario.competitors(i)) {
    pm.filters[k] = invert_proposal(profile, scenario, k, i, ra.filters[k]);
  }
  pm.filters[0] = invert_proposal(profile, scenario, kGovernment, i, ra.lower_bound_target);
  pm.min_trust = trust_value(scenario.platform(i).trust, ra.filters[i]);
  const double truthful_quota =
      view.others_supply + scenario.fraction(i) * pm.min_trust > 0.0
          ? ra.lower_bound_target * scenario.fraction(i) * pm.min_trust /
                (view.others_supply + scenario.fraction(i) * pm.min_trust)
          : 0.0;
  if (ra.min_trust < truthful_quota) {
    pm.min_trust = trust_proposal_for(scenario, i, ra.min_trust, ra.lower_bound_target,
                                      view.others_supply, ra.filters[i]);
  }
  return pm;
}

GovernmentMessage best_response_government(const Scenario& scenario,
                                           const MessageProfile& profile) {
  const auto prices = allocate_prices(profile, scenario);
  const double pi0 = prices.government_price;
  const auto& g = scenario.government();
  double target;
  if (g.weight <= 0.0) {
    target = 0.0;
  } else if (pi0 <= 0.0) {
    target = 1.0;
  } else {
    target = clamp01(g.weight / pi0 - 1.0 / g.rho);
    target = std::min(target, g.budget / pi0);
  }
  GovernmentMessage gm;
  gm.price = pi0;
  // Unpenalized proposal: stated as is, like a platform's own filter.
  gm.lower_bound = target;
  return gm;
}

double government_utility(const Scenario& scenario, const MessageProfile& profile) {
  const auto alloc = allocate_filters(profile, scenario);
  const double pi0 = allocate_prices(profile, scenario).government_price;
  const double a0 = alloc[0];
  if (!(a0 >= -kFeasibilityTolerance && a0 <= 1.0 + kFeasibilityTolerance)) return -kInf;
  if (pi0 * a0 > scenario.government().budget + kSupplyTolerance) return -kInf;
  const double d = profile.government.price - pi0;
  return government_value(scenario.government(), clamp01(a0)) - (pi0 * a0 + d * d);
}

namespace {

double max_abs_change(const MessageProfile& a, const MessageProfile& b) {
  double r = std::max(std::abs(a.government.price - b.government.price),
                      std::abs(a.government.lower_bound - b.government.lower_bound));
  for (std::size_t k = 0; k < a.platforms.size(); ++k) {
    const auto& x = a.platforms[k];
    const auto& y = b.platforms[k];
    r = std::max(r, std::abs(x.min_trust - y.min_trust));
    for (std::size_t j = 0; j < x.prices.size(); ++j) {
      r = std::max(r, std::abs(x.prices[j] - y.prices[j]));
      r = std::max(r, std::abs(x.filters[j] - y.filters[j]));
    }
  }
  return r;
}

bool all_finite(const MessageProfile& m) {
  if (!std::isfinite(m.government.price) || !std::isfinite(m.government.lower_bound)) return false;
  for (const auto& pm : m.platforms) {
    if (!std::isfinite(pm.min_trust)) return false;
    for (double x : pm.prices) if (!std::isfinite(x)) return false;
    for (double x : pm.filters) if (!std::isfinite(x)) return false;
  }
  return true;
}

double mix(double theta, double fresh, double old) { return theta * fresh + (1.0 - theta) * old; }

PlatformMessage damp(double theta, const PlatformMessage& fresh, const PlatformMessage& old) {
  PlatformMessage out = old;
  out.min_trust = mix(theta, fresh.min_trust, old.min_trust);
  for (std::size_t j = 0; j < old.prices.size(); ++j) {
    out.prices[j] = mix(theta, fresh.prices[j], old.prices[j]);
    out.filters[j] = mix(theta, fresh.filters[j], old.filters[j]);
  }
  return out;
}

GovernmentMessage damp(double theta, const GovernmentMessage& fresh, const GovernmentMessage& old) {
  return {mix(theta, fresh.price, old.price), mix(theta, fresh.lower_bound, old.lower_bound)};
}

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  const int workers = std::min(worker_count(threads), count);
  if (workers <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < count; k += workers) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

EquilibriumReport iterate_dynamics(const Scenario& scenario, const MessageProfile& init,
                                   const DynamicsParams& params) {
  if (!(params.damping > 0.0 && params.damping <= 1.0)) {
    throw ParameterError("damping must lie in (0, 1]");
  }
  validate_profile(init, scenario);
  const int n = scenario.num_platforms();
  const double theta = params.damping;
  MessageProfile m = init;
  int sweeps = 0;
  double residual = kInf;
  while (sweeps < params.max_sweeps) {
    const MessageProfile before = m;
    if (params.order == SweepOrder::kGaussSeidel) {
      m.government = damp(theta, best_response_government(scenario, m), m.government);
      for (PlayerId i = 1; i <= n; ++i) {
        m.platform(i) = damp(theta, best_response_platform(scenario, i, m), m.platform(i));
      }
    } else {
      std::vector<PlatformMessage> fresh(n);
      GovernmentMessage gov;
      parallel_for(n + 1, 0, [&](int k) {
        if (k == 0) {
          gov = best_response_government(scenario, before);
        } else {
          fresh[k - 1] = best_response_platform(scenario, k, before);
        }
      });
      m.government = damp(theta, gov, before.government);
      for (PlayerId i = 1; i <= n; ++i) m.platform(i) = damp(theta, fresh[i - 1], before.platform(i));
    }
    ++sweeps;
    if (!all_finite(m)) {
      // Diverged: report the last finite profile as unconverged.
      m = before;
      residual = kInf;
      break;
    }
    residual = max_abs_change(m, before);
    if (residual <= params.tolerance) break;
  }
  EquilibriumReport report =
      make_report(scenario, m, EquilibriumMethod::kDynamics, params.verify, params.search);
  report.iterations = sweeps;
  report.message_residual = sweeps == 0 ? 0.0 : residual;
  report.converged = sweeps > 0 && residual <= params.tolerance;
  return report;
}

namespace {

// Utility of platform i after replacing its message so that its filters hit
// `targets` (by id, C_i entries) and its quota is the largest it can support.
// Prices are the penalty-minimizing ones; allocated prices are message-independent
// for i and are taken from the base profile.
class PlatformDeviation {
 public:
  PlatformDeviation(const Scenario& s, PlayerId i, const MessageProfile& base)
      : s_(s), i_(i), base_(base), dev_(base), prices_(allocate_prices(base, s)) {
    for (PlayerId k = 1; k <= s.num_platforms(); ++k) {
      if (k != i) others_supply_ += s.fraction(k) * base.platform(k).min_trust;
    }
    others_bound_ = proposal_mean_excluding(base, s, kGovernment, i);
    auto& pm = dev_.platform(i);
    std::fill(pm.prices.begin(), pm.prices.end(), 0.0);
    if (has_price_key(s, i, i)) {
      double sum = 0.0;
      for (PlayerId l : s.rivals(i)) sum += base.platform(l).prices[i];
      pm.prices[i] = sum / static_cast<double>(s.rivals(i).size());
    }
  }

  double utility(const std::vector<double>& targets) {
    auto& pm = dev_.platform(i_);
    for (PlayerId k : s_.competitors(i_)) {
      pm.filters[k] = invert_proposal(base_, s_, k, i_, targets[k]);
    }
    for (PlayerId l : s_.rivals(i_)) {
      if (s_.competitor_count(l) == 2) {
        const double gap = pm.filters[l] - proposal_mean_excluding(base_, s_, l, i_);
        pm.prices[l] = std::max(0.0, base_.platform(l).prices[l] - 0.5 * gap * gap);
      }
    }
    const double supply =
        s_.fraction(i_) * trust_value(s_.platform(i_).trust, clamp01(targets[i_]));
    double bound;
    if (others_supply_ > 0.0) {
      bound = clamp01(std::max(supply, others_bound_));
    } else {
      bound = std::min(1.0, supply);
    }
    pm.filters[0] = invert_proposal(base_, s_, kGovernment, i_, bound);
    pm.min_trust = trust_proposal_for(s_, i_, std::min(supply, bound), bound, others_supply_,
                                      targets[i_]);
    const auto alloc = allocate_filters(dev_, s_);
    TrustQuota quota;
    try {
      quota = allocate_min_trust(dev_, s_, alloc[0]);
    } catch (const DegenerateTrustError&) {
      return -kInf;
    }
    const double a = alloc[i_];
    if (!(a >= -kFeasibilityTolerance && a <= 1.0 + kFeasibilityTolerance)) return -kInf;
    if (s_.fraction(i_) * trust_value(s_.platform(i_).trust, clamp01(a)) <
        quota.min_trust[i_] - kSupplyTolerance) {
      return -kInf;
    }
    const double tax = platform_tax_with(dev_, s_, i_, alloc, quota.min_trust, prices_);
    return valuation_value(s_.platform(i_).valuation, i_, snap_to_box(alloc)) - tax;
  }

 private:
  const Scenario& s_;
  PlayerId i_;
  const MessageProfile& base_;
  MessageProfile dev_;
  PriceAllocation prices_;
  double others_supply_ = 0.0;
  double others_bound_ = 0.0;
};

double search_platform(const Scenario& s, PlayerId i, const MessageProfile& base,
                       const std::vector<double>& start, const DeviationSearch& search) {
  PlatformDeviation dev(s, i, base);
  const auto keys = s.competitors(i);
  const int dim = static_cast<int>(keys.size());
  std::vector<double> grid;
  for (double x = 0.0; x < 1.0 - 1e-12; x += search.grid_step) grid.push_back(x);
  grid.push_back(1.0);
  const std::size_t g = grid.size();

  std::vector<double> t(s.num_players(), 0.0);
  std::vector<std::size_t> idx(dim, 0);
  double best = -kInf;
  std::vector<double> best_t = t;
  for (;;) {
    for (int d = 0; d < dim; ++d) t[keys[d]] = grid[idx[d]];
    const double u = dev.utility(t);
    if (u > best) {
      best = u;
      best_t = t;
    }
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == g) idx[d--] = 0;
    if (d < 0) break;
  }

  // Finite-difference projected gradient ascent from the grid incumbent and the current point.
  auto refine = [&](std::vector<double> x) {
    double fx = dev.utility(x);
    if (!std::isfinite(fx)) return fx;
    double step = 0.1;
    const double h = 1e-7;
    for (int it = 0; it < search.refine_iterations && step > 1e-14; ++it) {
      std::vector<double> grad(x.size(), 0.0);
      for (PlayerId k : keys) {
        auto xp = x, xm = x;
        xp[k] = std::min(1.0, x[k] + h);
        xm[k] = std::max(0.0, x[k] - h);
        const double fp = dev.utility(xp), fm = dev.utility(xm);
        if (std::isfinite(fp) && std::isfinite(fm)) {
          grad[k] = (fp - fm) / (xp[k] - xm[k]);
        } else if (std::isfinite(fp)) {
          grad[k] = (fp - fx) / (xp[k] - x[k]);
        } else if (std::isfinite(fm)) {
          grad[k] = (fx - fm) / (x[k] - xm[k]);
        }
      }
      bool improved = false;
      while (step > 1e-14) {
        auto xn = x;
        for (PlayerId k : keys) xn[k] = clamp01(x[k] + step * grad[k]);
        const double fn = dev.utility(xn);
        if (fn > fx) {
          x = xn;
          fx = fn;
          improved = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    return fx;
  };
  best = std::max(best, refine(best_t));
  best = std::max(best, refine(start));
  return best;
}

double search_government(const Scenario& s, const MessageProfile& base,
                         const DeviationSearch& search) {
  MessageProfile dev = base;
  dev.government.price = allocate_prices(base, s).government_price;
  auto u = [&](double target) {
    dev.government.lower_bound = invert_proposal(base, s, kGovernment, kGovernment, target);
    return government_utility(s, dev);
  };
  double best = -kInf, best_x = 0.0;
  for (double x = 0.0;; x += search.grid_step) {
    x = std::min(x, 1.0);
    const double v = u(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    if (x >= 1.0) break;
  }
  // Golden section around the grid incumbent; u is concave where finite.
  double lo = std::max(0.0, best_x - search.grid_step), hi = std::min(1.0, best_x + search.grid_step);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = u(x1), f2 = u(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = u(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = u(x1);
    }
  }
  best = std::max({best, f1, f2, u(allocate_filters(base, s)[0])});
  return best;
}

}  // namespace

DeviationResult verify_gne(const Scenario& scenario, const MessageProfile& profile,
                           const DeviationSearch& search) {
  validate_profile(profile, scenario);
  const int n = scenario.num_platforms();
  std::vector<double> base(n + 1, -kInf);
  base[0] = government_utility(scenario, profile);
  try {
    const Outcome out = outcome(profile, scenario);
    for (PlayerId i = 1; i <= n; ++i) base[i] = utility_or_neg_inf(scenario, out, i);
  } catch (const DegenerateTrustError&) {
  }
  const auto start = clamp_box(allocate_filters(profile, scenario));
  DeviationResult res;
  res.gains.assign(n + 1, 0.0);
  parallel_for(n + 1, search.threads, [&](int k) {
    const double best = k == 0 ? search_government(scenario, profile, search)
                               : search_platform(scenario, k, profile, start, search);
    double gain = 0.0;
    if (best > base[k]) gain = std::isinf(base[k]) ? kInf : best - base[k];
    res.gains[k] = gain;
  });
  for (PlayerId k = 0; k <= n; ++k) {
    if (res.gains[k] > res.max_gain) {
      res.max_gain = res.gains[k];
      res.argmax_player = k;
    }
  }
  return res;
}

EquilibriumReport make_report(const Scenario& scenario, const MessageProfile& profile,
                              EquilibriumMethod method, bool verify,
                              const DeviationSearch& search) {
  EquilibriumReport r;
  r.profile = profile;
  r.method = method;
  const int n = scenario.num_platforms();
  r.utilities.assign(n + 1, -kInf);
  r.utilities[0] = government_utility(scenario, profile);
  try {
    r.outcome = outcome(profile, scenario);
    for (PlayerId i = 1; i <= n; ++i) r.utilities[i] = utility_or_neg_inf(scenario, *r.outcome, i);
  } catch (const DegenerateTrustError&) {
    r.outcome.reset();
  }
  if (verify) {
    const auto dev = verify_gne(scenario, profile, search);
    r.verified = true;
    r.max_deviation_gain = dev.max_gain;
    r.deviation_player = dev.argmax_player;
  }
  return r;
}

ParetoResult pareto_check(const Scenario& scenario, const Outcome& outcome, int sample_count,
                          std::uint64_t seed) {
  ParetoResult res;
  const int n = scenario.num_platforms();
  const auto base_alloc = clamp_box(outcome.allocation);
  auto values = [&](const std::vector<double>& a) {
    std::vector<double> v(n + 1);
    v[0] = government_value(scenario.government(), a[0]);
    for (PlayerId i = 1; i <= n; ++i) v[i] = valuation_value(scenario.platform(i).valuation, i, a);
    return v;
  };
  // Taxes are held fixed, so utility changes are valuation changes.
  const auto base = values(base_alloc);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> dir(n + 1), a(n + 1);
  for (int sample = 0; sample < sample_count; ++sample) {
    double total = 0.0;
    for (auto& d : dir) {
      d = expo(rng);
      total += d;
    }
    const double radius = std::pow(10.0, -5.0 + 5.0 * unit(rng));
    for (int k = 0; k <= n; ++k) {
      const double sign = coin(rng) ? 1.0 : -1.0;
      a[k] = clamp01(base_alloc[k] + radius * sign * dir[k] / total);
    }
    double supply = 0.0;
    for (PlayerId i = 1; i <= n; ++i) {
      supply += scenario.fraction(i) * trust_value(scenario.platform(i).trust, a[i]);
    }
    a[0] = std::max(0.0, std::min(a[0], supply));
    const auto v = values(a);
    double gain = -kInf, worst = kInf;
    std::vector<double> change(n + 1);
    for (int k = 0; k <= n; ++k) {
      change[k] = v[k] - base[k];
      gain = std::max(gain, change[k]);
      worst = std::min(worst, change[k]);
    }
    if (worst >= -1e-9) {
      res.best_improvement = std::max(res.best_improvement, gain);
      if (gain > 1e-6 && !res.witness) res.witness = ParetoWitness{a, change, gain};
    }
  }
  if (res.witness) res.witness->best_improvement = res.best_improvement;
  return res;
}

std::vector<double> individual_rationality_margin(const Scenario& scenario,
                                                  const EquilibriumReport& report) {
  const int n = scenario.num_platforms();
  std::vector<double> zeros(n + 1, 0.0), margin(n + 1, 0.0);
  for (PlayerId i = 1; i <= n; ++i) {
    margin[i] = report.utilities[i] - valuation_value(scenario.platform(i).valuation, i, zeros);
  }
  return margin;
}

}  // namespace gnemech
