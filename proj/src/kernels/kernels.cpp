// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/kernels.hpp"

#include <cstdlib>
#include <string>

#include "skincal/errors.hpp"

namespace skincal::kernels {

// scalar reference (always present)
void poly5_frame_scalar(const double*, std::size_t, const double* const*, const double*,
                        const double*, const double*, const double*, double, double, double*);
void tare_subtract_scalar(const double*, const double*, std::size_t, double*);
void facet_force_scalar(const double*, const double*, const double*, const double*, std::size_t,
                        double*);

#ifdef SKINCAL_HAVE_AVX2
void poly5_frame_avx2(const double*, std::size_t, const double* const*, const double*,
                      const double*, const double*, const double*, double, double, double*);
void tare_subtract_avx2(const double*, const double*, std::size_t, double*);
void facet_force_avx2(const double*, const double*, const double*, const double*, std::size_t,
                      double*);
#endif

#ifdef SKINCAL_HAVE_NEON
void poly5_frame_neon(const double*, std::size_t, const double* const*, const double*,
                      const double*, const double*, const double*, double, double, double*);
void tare_subtract_neon(const double*, const double*, std::size_t, double*);
void facet_force_neon(const double*, const double*, const double*, const double*, std::size_t,
                      double*);
#endif

namespace {

constexpr KernelTable kScalarTable{poly5_frame_scalar, tare_subtract_scalar, facet_force_scalar};
#ifdef SKINCAL_HAVE_AVX2
constexpr KernelTable kAvx2Table{poly5_frame_avx2, tare_subtract_avx2, facet_force_avx2};
#endif
#ifdef SKINCAL_HAVE_NEON
constexpr KernelTable kNeonTable{poly5_frame_neon, tare_subtract_neon, facet_force_neon};
#endif

bool host_supports(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(SKINCAL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#ifdef SKINCAL_HAVE_NEON
      return true;  // f64 NEON is baseline on AArch64
#else
      return false;
#endif
  }
  return false;
}

Backend detect_default() {
  if (const char* env = std::getenv("SKINCAL_KERNELS")) {
    const std::string s(env);
    if (s == "scalar") return Backend::kScalar;
    if (s == "avx2" && host_supports(Backend::kAvx2)) return Backend::kAvx2;
    if (s == "neon" && host_supports(Backend::kNeon)) return Backend::kNeon;
    // unknown or unsupported request falls through to autodetection
  }
  if (host_supports(Backend::kAvx2)) return Backend::kAvx2;
  if (host_supports(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

Backend& active_slot() {
  static Backend active = detect_default();
  return active;
}

}  // namespace

bool available(Backend b) { return host_supports(b); }

Backend active_backend() { return active_slot(); }

void set_backend(Backend b) {
  if (!host_supports(b)) {
    throw Error("kernel backend not supported on this host: " + std::string(backend_name(b)));
  }
  active_slot() = b;
}

const KernelTable& table_for(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return kScalarTable;
    case Backend::kAvx2:
#ifdef SKINCAL_HAVE_AVX2
      if (host_supports(Backend::kAvx2)) return kAvx2Table;
#endif
      break;
    case Backend::kNeon:
#ifdef SKINCAL_HAVE_NEON
      return kNeonTable;
#endif
      break;
  }
  throw Error("kernel backend not supported on this host: " + std::string(backend_name(b)));
}

const KernelTable& table() { return table_for(active_slot()); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

}  // namespace skincal::kernels
