// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "gnemech/model.hpp"

namespace gnemech::fixtures {

/// Three symmetric platforms on a complete graph: equal users, w = 1,
/// c = 0.5, q = 0.25, linear trust, v_0 = 2 log(1 + a_0), b_0 = 10.
Scenario tri_sym(Variant variant = Variant::kStandard);
/// tri_sym with the quasi_concave_exp valuation family.
Scenario tri_sym_quasi();
/// Two platforms competing only with each other (extended variant).
Scenario duo_extended();
/// No cross benefits and a flat government valuation.
Scenario zero_benefit();

/// Builtin scenario by name (tri-sym, tri-sym-quasi, duo-extended, zero-benefit).
/// Throws IOError for an unknown name.
Scenario builtin(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace gnemech::fixtures
