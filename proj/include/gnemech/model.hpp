// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gnemech {

/// Player index. 0 is the government, platforms are 1..I.
using PlayerId = int;
inline constexpr PlayerId kGovernment = 0;

enum class Variant { kStandard, kExtended };
enum class ValuationFamily { kLogLinearQuadratic, kQuasiConcaveExp };
enum class TrustFamily { kPower, kComplementPower };

std::string to_string(Variant v);
std::string to_string(ValuationFamily f);
std::string to_string(TrustFamily f);
Variant parse_variant(const std::string& s);
ValuationFamily parse_valuation_family(const std::string& s);
TrustFamily parse_trust_family(const std::string& s);

struct CrossWeight {
  PlayerId id;
  double weight;
};

/// Platform valuation v_i. With base(a) = sum_l w_il log(1 + a_l) - c a_i - q a_i^2
/// the log_linear_quadratic family is base itself and quasi_concave_exp is
/// exp(base) - 1.
struct ValuationSpec {
  ValuationFamily family = ValuationFamily::kLogLinearQuadratic;
  std::vector<CrossWeight> cross_weights;  // sorted by id, self excluded
  double own_linear_cost = 0.0;
  double own_quadratic_cost = 0.0;

  double weight_of(PlayerId l) const;
};

/// Average trust h_i on [0,1]: power a^g (0 < g <= 1) or complement
/// power 1 - (1 - a)^k (k >= 1).
struct TrustSpec {
  TrustFamily family = TrustFamily::kPower;
  double exponent = 1.0;
};

/// v_0(a_0) = weight * log(1 + rho * a_0).
struct GovernmentSpec {
  double budget = 0.0;
  double weight = 0.0;
  double rho = 1.0;
};

struct PlatformSpec {
  PlayerId id = 0;
  std::int64_t users = 1;
  std::vector<PlayerId> competitors;  // C_i, includes id, sorted
  ValuationSpec valuation;
  TrustSpec trust;
};

/// Unvalidated scenario description, as parsed from a file or built in code.
struct ScenarioSpec {
  Variant variant = Variant::kStandard;
  std::vector<PlatformSpec> platforms;
  GovernmentSpec government;
};

struct ValidationOptions {
  /// Admit w_il = 0 (zero-benefit fixtures). Negative weights stay rejected.
  bool allow_zero_weights = false;
};

/// A validated, immutable game description.
class Scenario {
 public:
  Variant variant() const { return spec_.variant; }
  int num_platforms() const { return static_cast<int>(spec_.platforms.size()); }
  int num_players() const { return num_platforms() + 1; }
  const PlatformSpec& platform(PlayerId id) const { return spec_.platforms[id - 1]; }
  const GovernmentSpec& government() const { return spec_.government; }
  const ScenarioSpec& spec() const { return spec_; }

  /// n_i, indexed by player id (entry 0 unused and zero).
  const std::vector<double>& fractions() const { return fractions_; }
  double fraction(PlayerId id) const { return fractions_[id]; }

  /// C_i including i.
  std::span<const PlayerId> competitors(PlayerId i) const { return platform(i).competitors; }
  /// C_{-i}.
  std::span<const PlayerId> rivals(PlayerId i) const { return rivals_[i]; }
  int competitor_count(PlayerId i) const {
    return static_cast<int>(platform(i).competitors.size());
  }
  bool competes(PlayerId i, PlayerId l) const;

 private:
  friend Scenario validate_scenario(ScenarioSpec raw, const ValidationOptions& options);
  explicit Scenario(ScenarioSpec spec);

  ScenarioSpec spec_;
  std::vector<double> fractions_;
  std::vector<std::vector<PlayerId>> rivals_;
};

/// Enforces the modelling assumptions. Throws CardinalityError,
/// AsymmetryError or ParameterError.
Scenario validate_scenario(ScenarioSpec raw, const ValidationOptions& options = {});

/// n_i = N_i / sum_l N_l, indexed by player id (entry 0 is zero).
std::vector<double> fractions(const Scenario& scenario);

struct ValuationEval {
  double value = 0.0;
  std::vector<double> gradient;  // indexed by player id; zero outside C_i
};

/// `alloc` is indexed by player id; only the entries in C_owner are read.
/// Throws DomainError if any of them lies outside [0,1].
ValuationEval eval_valuation(const ValuationSpec& spec, PlayerId owner,
                             std::span<const double> alloc);

// Unchecked fast paths used by the solvers. `alloc` must already be in range.
double valuation_value(const ValuationSpec& spec, PlayerId owner, std::span<const double> alloc);
double valuation_partial(const ValuationSpec& spec, PlayerId owner,
                         std::span<const double> alloc, PlayerId k);

struct TrustEval {
  double value = 0.0;
  double derivative = 0.0;
};

/// Throws DomainError outside [0,1]. The derivative of a fractional power at
/// zero is +infinity.
TrustEval eval_trust(const TrustSpec& spec, double a);
double trust_value(const TrustSpec& spec, double a);
double trust_derivative(const TrustSpec& spec, double a);
/// Smallest a in [0,1] with h(a) >= y, for y in [0,1].
double trust_inverse(const TrustSpec& spec, double y);

struct GovernmentEval {
  double value = 0.0;
  double derivative = 0.0;
};
GovernmentEval eval_government_valuation(const GovernmentSpec& spec, double a0);
double government_value(const GovernmentSpec& spec, double a0);

/// Deterministic random scenario. Parameter ranges: w in [0.5, 2],
/// c in [0.1, 1], q in [0, 0.5], trust exponent in [0.5, 1], w_0 in [0.5, 4],
/// rho = 1, b_0 in [5, 50], users in [50, 500].
Scenario gen_random_scenario(std::uint64_t seed, int num_platforms, Variant variant);

}  // namespace gnemech
