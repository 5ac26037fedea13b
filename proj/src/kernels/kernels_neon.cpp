// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

// NEON (AArch64) variants; float64x2 lanes. Same op sequence as the scalar
// reference, remainder lanes via the scalar element helpers.

#include <arm_neon.h>

#include "skincal/kernels.hpp"

namespace skincal::kernels {

namespace {

inline float64x2_t clamp_f64(float64x2_t x, float64x2_t lo, float64x2_t hi) {
  return vminq_f64(vmaxq_f64(x, lo), hi);
}

}  // namespace

void poly5_frame_neon(const double* raw, std::size_t n, const double* const* coeff,
                      const double* center, const double* inv_half, const double* raw_lo,
                      const double* raw_hi, double out_lo, double out_hi, double* out) {
  const float64x2_t vout_lo = vdupq_n_f64(out_lo);
  const float64x2_t vout_hi = vdupq_n_f64(out_hi);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vld1q_f64(raw + i);
    const float64x2_t lo = vld1q_f64(raw_lo + i);
    const float64x2_t hi = vld1q_f64(raw_hi + i);
    const float64x2_t c = vld1q_f64(center + i);
    const float64x2_t ih = vld1q_f64(inv_half + i);
    const float64x2_t x = vmulq_f64(vsubq_f64(clamp_f64(r, lo, hi), c), ih);
    float64x2_t acc = vld1q_f64(coeff[5] + i);
    acc = vfmaq_f64(vld1q_f64(coeff[4] + i), acc, x);
    acc = vfmaq_f64(vld1q_f64(coeff[3] + i), acc, x);
    acc = vfmaq_f64(vld1q_f64(coeff[2] + i), acc, x);
    acc = vfmaq_f64(vld1q_f64(coeff[1] + i), acc, x);
    acc = vfmaq_f64(vld1q_f64(coeff[0] + i), acc, x);
    vst1q_f64(out + i, clamp_f64(acc, vout_lo, vout_hi));
  }
  for (; i < n; ++i) {
    out[i] = detail::poly5_one(raw[i], coeff, i, center[i], inv_half[i], raw_lo[i], raw_hi[i],
                               out_lo, out_hi);
  }
}

void tare_subtract_neon(const double* p, const double* tare, std::size_t n, double* out) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(p + i), vld1q_f64(tare + i));
    vst1q_f64(out + i, vmaxq_f64(d, zero));
  }
  for (; i < n; ++i) out[i] = detail::tare_one(p[i], tare[i]);
}

void facet_force_neon(const double* p0, const double* p1, const double* p2, const double* area,
                      std::size_t n, double* out) {
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t three = vdupq_n_f64(3.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vld1q_f64(p0 + i);
    const float64x2_t b = vld1q_f64(p1 + i);
    const float64x2_t c = vld1q_f64(p2 + i);
    const float64x2_t m01 = vmulq_f64(half, vaddq_f64(a, b));
    const float64x2_t m12 = vmulq_f64(half, vaddq_f64(b, c));
    const float64x2_t m20 = vmulq_f64(half, vaddq_f64(c, a));
    const float64x2_t w = vdivq_f64(vld1q_f64(area + i), three);
    vst1q_f64(out + i, vmulq_f64(w, vaddq_f64(m01, vaddq_f64(m12, m20))));
  }
  for (; i < n; ++i) out[i] = detail::facet_force_one(p0[i], p1[i], p2[i], area[i]);
}

}  // namespace skincal::kernels
