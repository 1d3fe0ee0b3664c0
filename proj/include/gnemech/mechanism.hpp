// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "gnemech/model.hpp"

namespace gnemech {

/// Slack used by feasibility flags. Allocations are means of proposals, so a
/// profile built from an exact target can miss it by a few ulps.
inline constexpr double kFeasibilityTolerance = 1e-12;
/// Slack on quota <= n_i h_i(alpha_i) and on the budget. Quotas and supplies
/// come out of different averages and only meet at the limit of a learning
/// process, so this is looser than the box tolerance.
inline constexpr double kSupplyTolerance = 1e-9;

/// Message of platform i. Both vectors are dense and indexed by player id
/// (size I+1); entries outside the key sets must be zero.
struct PlatformMessage {
  double min_trust = 0.0;       // proposed minimum trust
  std::vector<double> prices;   // p_l^i for l in price_keys(i)
  std::vector<double> filters;  // proposed filter for k in C_i, and lower bound at index 0
};

struct GovernmentMessage {
  double price = 0.0;
  double lower_bound = 0.0;
};

struct MessageProfile {
  GovernmentMessage government;
  std::vector<PlatformMessage> platforms;  // platforms[i - 1] belongs to platform i

  PlatformMessage& platform(PlayerId i) { return platforms[i - 1]; }
  const PlatformMessage& platform(PlayerId i) const { return platforms[i - 1]; }
};

/// Dense (I+1) x (I+1) table. Row = the platform that pays or receives.
class PriceTable {
 public:
  PriceTable() = default;
  explicit PriceTable(int players) : n_(players), data_(players * players, 0.0) {}
  double& operator()(PlayerId row, PlayerId col) { return data_[row * n_ + col]; }
  double operator()(PlayerId row, PlayerId col) const { return data_[row * n_ + col]; }
  bool operator==(const PriceTable&) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

struct PriceAllocation {
  PriceTable payment;  // payment(i, l): price i pays per unit of l's filter
  PriceTable subsidy;  // subsidy(i, l): price i receives from l per unit of its own filter
  double government_price = 0.0;
};

struct TrustQuota {
  std::vector<double> min_trust;  // indexed by player id, entry 0 is zero
  bool clipped = false;
};

struct Outcome {
  std::vector<double> allocation;  // [0] = lower bound, [i] = filter of platform i
  std::vector<double> min_trust;   // [i] = quota of platform i, [0] = 0
  PriceTable payment;
  PriceTable subsidy;
  double government_price = 0.0;
  std::vector<double> taxes;  // [0] = government investment
  std::vector<bool> feasible;  // [0]: bound in box and within budget; [i]: S_i(m) membership
  bool quota_clipped = false;

  bool operator==(const Outcome&) const = default;
};

bool has_price_key(const Scenario& scenario, PlayerId i, PlayerId l);
std::vector<PlayerId> price_keys(const Scenario& scenario, PlayerId i);
/// D_i: own filter, competitors' filters, and 0 for the lower bound.
std::vector<PlayerId> filter_keys(const Scenario& scenario, PlayerId i);

MessageProfile zero_profile(const Scenario& scenario);

/// Checks shape, key sets and price signs. Throws ParameterError.
void validate_profile(const MessageProfile& profile, const Scenario& scenario);

/// Means of the proposals. Entry 0 is the lower bound.
std::vector<double> allocate_filters(const MessageProfile& profile, const Scenario& scenario);

/// Mean of the proposals for l (0 = lower bound) leaving out player i's.
double proposal_mean_excluding(const MessageProfile& profile, const Scenario& scenario,
                               PlayerId l, PlayerId i);

/// Quotas proportional to n_i h_i. When every proposed trust is zero the
/// quotas are zero if the lower bound is zero; otherwise DegenerateTrustError.
TrustQuota allocate_min_trust(const MessageProfile& profile, const Scenario& scenario);
TrustQuota allocate_min_trust(const MessageProfile& profile, const Scenario& scenario,
                              double lower_bound);

PriceAllocation allocate_prices(const MessageProfile& profile, const Scenario& scenario);

double platform_tax(const MessageProfile& profile, const Scenario& scenario, PlayerId i);
/// Same, reusing allocations, quotas and prices computed by the caller.
double platform_tax_with(const MessageProfile& profile, const Scenario& scenario, PlayerId i,
                         std::span<const double> allocation, std::span<const double> min_trust,
                         const PriceAllocation& prices);
double government_tax(const MessageProfile& profile, const Scenario& scenario);

Outcome outcome(const MessageProfile& profile, const Scenario& scenario);

/// Throws InfeasibleAllocationError if the player's feasible flag is false.
double utility(const Scenario& scenario, const Outcome& outcome, PlayerId player);
/// Same, with -infinity in place of the error.
double utility_or_neg_inf(const Scenario& scenario, const Outcome& outcome, PlayerId player);

/// Box-clamps entries within kFeasibilityTolerance of [0,1].
std::vector<double> snap_to_box(std::vector<double> allocation);

}  // namespace gnemech
