// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

// AVX2+FMA variants. Compiled with -mavx2 -mfma; only reachable after the
// dispatcher has confirmed CPU support. Vector bodies mirror the scalar
// reference op-for-op; remainder lanes reuse the scalar element helpers, so
// output is bit-identical to the scalar backend for finite inputs.

#include <immintrin.h>

#include "skincal/kernels.hpp"

namespace skincal::kernels {

namespace {

inline __m256d clamp_pd(__m256d x, __m256d lo, __m256d hi) {
  return _mm256_min_pd(_mm256_max_pd(x, lo), hi);
}

}  // namespace

void poly5_frame_avx2(const double* raw, std::size_t n, const double* const* coeff,
                      const double* center, const double* inv_half, const double* raw_lo,
                      const double* raw_hi, double out_lo, double out_hi, double* out) {
  const __m256d vout_lo = _mm256_set1_pd(out_lo);
  const __m256d vout_hi = _mm256_set1_pd(out_hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(raw + i);
    const __m256d lo = _mm256_loadu_pd(raw_lo + i);
    const __m256d hi = _mm256_loadu_pd(raw_hi + i);
    const __m256d c = _mm256_loadu_pd(center + i);
    const __m256d ih = _mm256_loadu_pd(inv_half + i);
    const __m256d x = _mm256_mul_pd(_mm256_sub_pd(clamp_pd(r, lo, hi), c), ih);
    __m256d acc = _mm256_loadu_pd(coeff[5] + i);
    acc = _mm256_fmadd_pd(acc, x, _mm256_loadu_pd(coeff[4] + i));
    acc = _mm256_fmadd_pd(acc, x, _mm256_loadu_pd(coeff[3] + i));
    acc = _mm256_fmadd_pd(acc, x, _mm256_loadu_pd(coeff[2] + i));
    acc = _mm256_fmadd_pd(acc, x, _mm256_loadu_pd(coeff[1] + i));
    acc = _mm256_fmadd_pd(acc, x, _mm256_loadu_pd(coeff[0] + i));
    _mm256_storeu_pd(out + i, clamp_pd(acc, vout_lo, vout_hi));
  }
  for (; i < n; ++i) {
    out[i] = detail::poly5_one(raw[i], coeff, i, center[i], inv_half[i], raw_lo[i], raw_hi[i],
                               out_lo, out_hi);
  }
}

void tare_subtract_avx2(const double* p, const double* tare, std::size_t n, double* out) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(tare + i));
    _mm256_storeu_pd(out + i, _mm256_max_pd(d, zero));
  }
  for (; i < n; ++i) out[i] = detail::tare_one(p[i], tare[i]);
}

void facet_force_avx2(const double* p0, const double* p1, const double* p2, const double* area,
                      std::size_t n, double* out) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(p0 + i);
    const __m256d b = _mm256_loadu_pd(p1 + i);
    const __m256d c = _mm256_loadu_pd(p2 + i);
    const __m256d m01 = _mm256_mul_pd(half, _mm256_add_pd(a, b));
    const __m256d m12 = _mm256_mul_pd(half, _mm256_add_pd(b, c));
    const __m256d m20 = _mm256_mul_pd(half, _mm256_add_pd(c, a));
    const __m256d w = _mm256_div_pd(_mm256_loadu_pd(area + i), three);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(w, _mm256_add_pd(m01, _mm256_add_pd(m12, m20))));
  }
  for (; i < n; ++i) out[i] = detail::facet_force_one(p0[i], p1[i], p2[i], area[i]);
}

}  // namespace skincal::kernels
