// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>

namespace gnemech::kernels {

/// Best entry of one grid row. Ties resolve to the smallest index.
struct RowBest {
  double value;
  std::size_t index;
};

/// Scans value_j = base_value + own[j] + gov_weight * log(1 + gov_rho * min(1, base_supply + supply[j]))
/// for j in [0, n) and returns the maximum. n must be > 0.
RowBest reduce_grid_row(const double* own, const double* supply, std::size_t n,
                        double base_value, double base_supply, double gov_weight,
                        double gov_rho);
RowBest reduce_grid_row_scalar(const double* own, const double* supply, std::size_t n,
                               double base_value, double base_supply, double gov_weight,
                               double gov_rho);
RowBest reduce_grid_row_avx2(const double* own, const double* supply, std::size_t n,
                             double base_value, double base_supply, double gov_weight,
                             double gov_rho);

/// Natural log of positive normal inputs.
void batch_log(const double* x, double* out, std::size_t n);
void batch_log_scalar(const double* x, double* out, std::size_t n);
void batch_log_avx2(const double* x, double* out, std::size_t n);

enum class Isa { kScalar, kAvx2 };

bool avx2_supported();
/// The variant used by the dispatching entry points.
Isa active_isa();
/// Pins the dispatch (tests). std::nullopt restores CPU detection.
/// Requesting kAvx2 on a CPU without it falls back to scalar.
void force_isa(std::optional<Isa> isa);

}  // namespace gnemech::kernels
