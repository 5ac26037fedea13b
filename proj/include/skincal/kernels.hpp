// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

namespace skincal::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

/// Data-parallel inner loops used by frame evaluation and force integration.
/// All variants of one kernel compute the identical IEEE operation sequence
/// per element (fused multiply-adds included), so results are bit-equal
/// across backends for finite inputs.
struct KernelTable {
  /// Per-element quintic in a scaled variable:
  ///   x    = (clamp(raw[i], raw_lo[i], raw_hi[i]) - center[i]) * inv_half[i]
  ///   y    = ((((c5*x + c4)*x + c3)*x + c2)*x + c1)*x + c0   (fma chain)
  ///   out  = clamp(y, out_lo, out_hi)
  /// coeff[k] points at the n-vector of degree-k coefficients.
  void (*poly5_frame)(const double* raw, std::size_t n, const double* const* coeff,
                      const double* center, const double* inv_half, const double* raw_lo,
                      const double* raw_hi, double out_lo, double out_hi, double* out);

  /// out[i] = max(0, p[i] - tare[i])
  void (*tare_subtract)(const double* p, const double* tare, std::size_t n, double* out);

  /// Edge-midpoint quadrature weight of one facet with vertex values p0,p1,p2:
  ///   out[i] = (area[i]/3) * (0.5*(p0+p1) + 0.5*(p1+p2) + 0.5*(p2+p0))
  void (*facet_force)(const double* p0, const double* p1, const double* p2,
                      const double* area, std::size_t n, double* out);
};

bool available(Backend b);
Backend active_backend();
/// Selects the backend for subsequent table() calls; throws skincal::Error if
/// the host does not support it. Honors SKINCAL_KERNELS=scalar|avx2|neon at
/// first use.
void set_backend(Backend b);
const KernelTable& table();
const KernelTable& table_for(Backend b);
std::string_view backend_name(Backend b);

namespace detail {

// Single-element reference ops. SIMD remainder loops call these so partial
// vectors match the scalar backend exactly.

inline double clamp_finite(double x, double lo, double hi) {
  double t = x < lo ? lo : x;
  return t > hi ? hi : t;
}

inline double poly5_one(double raw, const double* const* c, std::size_t i, double center,
                        double inv_half, double raw_lo, double raw_hi, double out_lo,
                        double out_hi) {
  const double x = (clamp_finite(raw, raw_lo, raw_hi) - center) * inv_half;
  double acc = c[5][i];
  acc = std::fma(acc, x, c[4][i]);
  acc = std::fma(acc, x, c[3][i]);
  acc = std::fma(acc, x, c[2][i]);
  acc = std::fma(acc, x, c[1][i]);
  acc = std::fma(acc, x, c[0][i]);
  return clamp_finite(acc, out_lo, out_hi);
}

inline double tare_one(double p, double tare) {
  const double d = p - tare;
  return d < 0.0 ? 0.0 : d;
}

inline double facet_force_one(double p0, double p1, double p2, double area) {
  const double m01 = 0.5 * (p0 + p1);
  const double m12 = 0.5 * (p1 + p2);
  const double m20 = 0.5 * (p2 + p0);
  return (area / 3.0) * (m01 + (m12 + m20));
}

}  // namespace detail

/// Deterministic pairwise reduction (fixed association tree independent of
/// chunking), used wherever facet contributions are summed.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace skincal::kernels
