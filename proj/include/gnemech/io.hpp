// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gnemech/mechanism.hpp"
#include "gnemech/model.hpp"

namespace gnemech {

// Scenario files:
//   {"variant": "standard",
//    "platforms": [{"id": 1, "users": 100, "competitors": [1, 2, 3],
//                   "valuation": {"family": "log_linear_quadratic",
//                                 "cross_weights": [{"id": 2, "weight": 1.0}, ...],
//                                 "own_linear_cost": 0.5, "own_quadratic_cost": 0.25},
//                   "trust": {"family": "power", "exponent": 1.0}}, ...],
//    "government": {"budget": 10, "valuation": {"family": "log", "weight": 2, "rho": 1}}}
// An optional top-level "allow_zero_weights": true admits zero cross weights.
//
// Profile files mirror MessageProfile; prices and filters are objects keyed
// by player id, missing keys read as zero:
//   {"government": {"price": 0.3, "lower_bound": 0.9},
//    "platforms": [{"id": 1, "min_trust": 0.3,
//                   "prices": {"0": 0.3, "2": 0.1}, "filters": {"0": 0.9, "1": 0.5}}, ...]}

/// Throws IOError on unreadable or malformed files, and the validation
/// errors of validate_scenario on bad content.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
/// A builtin fixture name or a file path.
Scenario resolve_scenario(const std::string& name_or_path);
std::string scenario_to_json(const Scenario& scenario);
/// The same game under another variant, revalidated.
Scenario with_variant(const Scenario& scenario, Variant variant);

MessageProfile parse_profile(const std::string& text, const Scenario& scenario);
MessageProfile load_profile(const std::string& path, const Scenario& scenario);
std::string profile_to_json(const MessageProfile& profile, const Scenario& scenario);
void save_text(const std::string& path, const std::string& text);

}  // namespace gnemech
