// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <cmath>

#include "gnemech/kernels.hpp"

namespace gnemech::kernels {

RowBest reduce_grid_row_scalar(const double* own, const double* supply, std::size_t n,
                               double base_value, double base_supply, double gov_weight,
                               double gov_rho) {
  RowBest best{-HUGE_VAL, 0};
  for (std::size_t j = 0; j < n; ++j) {
    const double bound = std::min(1.0, base_supply + supply[j]);
    const double v = base_value + own[j] + gov_weight * std::log(1.0 + gov_rho * bound);
    if (v > best.value) best = {v, j};
  }
  return best;
}

void batch_log_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = std::log(x[j]);
}

namespace {

// 0 = detect, 1 = scalar, 2 = avx2
std::atomic<int> forced{0};

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  const int f = forced.load(std::memory_order_relaxed);
  if (f == 1) return Isa::kScalar;
  return avx2_supported() ? Isa::kAvx2 : Isa::kScalar;
}

void force_isa(std::optional<Isa> isa) {
  forced.store(!isa ? 0 : (*isa == Isa::kScalar ? 1 : 2), std::memory_order_relaxed);
}

RowBest reduce_grid_row(const double* own, const double* supply, std::size_t n,
                        double base_value, double base_supply, double gov_weight,
                        double gov_rho) {
  if (active_isa() == Isa::kAvx2) {
    return reduce_grid_row_avx2(own, supply, n, base_value, base_supply, gov_weight, gov_rho);
  }
  return reduce_grid_row_scalar(own, supply, n, base_value, base_supply, gov_weight, gov_rho);
}

void batch_log(const double* x, double* out, std::size_t n) {
  if (active_isa() == Isa::kAvx2) {
    batch_log_avx2(x, out, n);
  } else {
    batch_log_scalar(x, out, n);
  }
}

}  // namespace gnemech::kernels
