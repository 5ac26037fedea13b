// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/kernels.hpp"

namespace skincal::kernels {

void poly5_frame_scalar(const double* raw, std::size_t n, const double* const* coeff,
                        const double* center, const double* inv_half, const double* raw_lo,
                        const double* raw_hi, double out_lo, double out_hi, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = detail::poly5_one(raw[i], coeff, i, center[i], inv_half[i], raw_lo[i], raw_hi[i],
                               out_lo, out_hi);
  }
}

void tare_subtract_scalar(const double* p, const double* tare, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::tare_one(p[i], tare[i]);
}

void facet_force_scalar(const double* p0, const double* p1, const double* p2, const double* area,
                        std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::facet_force_one(p0[i], p1[i], p2[i], area[i]);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace skincal::kernels
