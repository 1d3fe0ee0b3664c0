// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 -mfma. Only reached through the dispatcher after a CPU check.

#include <immintrin.h>

#include <cmath>

#include "gnemech/kernels.hpp"

namespace gnemech::kernels {

namespace {

// log(x) for positive normal x. x = 2^e * m with m folded into [sqrt(1/2), sqrt(2));
// log(m) = 2 atanh(f), f = (m-1)/(m+1), |f| < 0.1716, via an 11 term odd series.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Biased exponent as a double: OR into the mantissa of 2^52, then subtract 2^52.
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s = _mm256_mul_pd(f, f);
  __m256d p = _mm256_set1_pd(1.0 / 23.0);
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 3.0));
  // log(m) = 2f + 2f*s*p
  const __m256d two_f = _mm256_add_pd(f, f);
  const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_f, s), p, two_f);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  return _mm256_fmadd_pd(e, ln2_hi, _mm256_fmadd_pd(e, ln2_lo, log_m));
}

}  // namespace

void batch_log_avx2(const double* x, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, log_pd(_mm256_loadu_pd(x + j)));
  for (; j < n; ++j) {
    alignas(32) double buf[4] = {x[j], 1.0, 1.0, 1.0};
    _mm256_store_pd(buf, log_pd(_mm256_load_pd(buf)));
    out[j] = buf[0];
  }
}

RowBest reduce_grid_row_avx2(const double* own, const double* supply, std::size_t n,
                             double base_value, double base_supply, double gov_weight,
                             double gov_rho) {
  const __m256d vbase = _mm256_set1_pd(base_value);
  const __m256d vsupply = _mm256_set1_pd(base_supply);
  const __m256d vw = _mm256_set1_pd(gov_weight);
  const __m256d vrho = _mm256_set1_pd(gov_rho);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d best = _mm256_set1_pd(-HUGE_VAL);
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d bound = _mm256_min_pd(one, _mm256_add_pd(vsupply, _mm256_loadu_pd(supply + j)));
    const __m256d lg = log_pd(_mm256_fmadd_pd(vrho, bound, one));
    const __m256d v = _mm256_fmadd_pd(vw, lg, _mm256_add_pd(vbase, _mm256_loadu_pd(own + j)));
    const __m256d better = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double bv[4];
  alignas(32) double bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_pd(bi, best_idx);
  RowBest out{-HUGE_VAL, 0};
  for (int lane = 0; lane < 4; ++lane) {
    const auto k = static_cast<std::size_t>(bi[lane]);
    if (bv[lane] > out.value || (bv[lane] == out.value && k < out.index)) out = {bv[lane], k};
  }
  for (; j < n; ++j) {
    const double bound = std::fmin(1.0, base_supply + supply[j]);
    alignas(32) double buf[4] = {1.0 + gov_rho * bound, 1.0, 1.0, 1.0};
    _mm256_store_pd(buf, log_pd(_mm256_load_pd(buf)));
    const double v = base_value + own[j] + gov_weight * buf[0];
    if (v > out.value) out = {v, j};
  }
  return out;
}

}  // namespace gnemech::kernels
