// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "skincal/errors.hpp"
#include "skincal/kernels.hpp"

namespace k = skincal::kernels;

namespace {

struct Bank {
  std::vector<double> raw, center, inv_half, lo, hi, out;
  std::array<std::vector<double>, 6> coeff;

  explicit Bank(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    raw.resize(n);
    center.resize(n);
    inv_half.resize(n);
    lo.resize(n);
    hi.resize(n);
    out.resize(n);
    for (auto& c : coeff) c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = 255.0 * u01(rng) * 0.4;
      hi[i] = lo[i] + 20.0 + 200.0 * u01(rng);
      raw[i] = -20.0 + 300.0 * u01(rng);
      center[i] = 0.5 * (lo[i] + hi[i]);
      inv_half[i] = 1.0 / (0.5 * (hi[i] - lo[i]));
      for (auto& c : coeff) c[i] = -50.0 + 100.0 * u01(rng);
    }
  }

  const double* cptr[6];
  const double* const* coeffs() {
    for (int j = 0; j < 6; ++j) cptr[j] = coeff[j].data();
    return cptr;
  }
};

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar backend is always available and selected tables resolve") {
  CHECK(k::available(k::Backend::kScalar));
  CHECK(k::backend_name(k::Backend::kScalar) == "scalar");
  CHECK(k::table_for(k::Backend::kScalar).poly5_frame != nullptr);
  // the active backend must be one the host supports
  CHECK(k::available(k::active_backend()));
}

TEST_CASE("unavailable backends are rejected") {
  for (auto b : {k::Backend::kAvx2, k::Backend::kNeon}) {
    if (!k::available(b)) {
      CHECK_THROWS_AS(k::set_backend(b), skincal::Error);
      CHECK_THROWS_AS(k::table_for(b), skincal::Error);
    }
  }
}

TEST_CASE("poly5_frame: hand-checked values on the scalar reference") {
  const double raw[] = {10.0, 20.0};
  const double c0[] = {1.0, 0.0}, c1[] = {2.0, 0.0}, c2[] = {0.0, 0.0}, c3[] = {0.0, 0.0},
               c4[] = {0.0, 0.0}, c5[] = {0.0, 1.0};
  const double* cptr[6] = {c0, c1, c2, c3, c4, c5};
  const double center[] = {10.0, 10.0};
  const double inv_half[] = {0.1, 0.1};
  const double lo[] = {0.0, 0.0}, hi[] = {255.0, 255.0};
  double out[2];
  k::table_for(k::Backend::kScalar)
      .poly5_frame(raw, 2, cptr, center, inv_half, lo, hi, -1e9, 1e9, out);
  CHECK(out[0] == doctest::Approx(1.0));  // x = 0 -> c0
  CHECK(out[1] == doctest::Approx(1.0));  // x = 1 -> c5 * 1^5
}

TEST_CASE("poly5_frame clamps raw input and output range") {
  const double raw[] = {-50.0, 400.0};
  const double c0[] = {5.0, 5.0}, z[] = {0.0, 0.0}, c1[] = {1.0, 1.0};
  const double* cptr[6] = {c0, c1, z, z, z, z};
  const double center[] = {100.0, 100.0};
  const double inv_half[] = {0.01, 0.01};
  const double lo[] = {50.0, 50.0}, hi[] = {150.0, 150.0};
  double out[2];
  k::table_for(k::Backend::kScalar).poly5_frame(raw, 2, cptr, center, inv_half, lo, hi, 0.0, 5.2,
                                                out);
  CHECK(out[0] == doctest::Approx(4.5));  // clamped to raw 50 -> x=-0.5 -> 4.5
  CHECK(out[1] == doctest::Approx(5.2));  // raw clamp to 150 gives 5.5, output clamp 5.2
}

TEST_CASE("SIMD variants match the scalar reference bit for bit") {
  std::mt19937_64 rng(0xC0FFEE);
  for (auto backend : {k::Backend::kAvx2, k::Backend::kNeon}) {
    if (!k::available(backend)) continue;
    CAPTURE(k::backend_name(backend));
    const auto& simd = k::table_for(backend);
    const auto& ref = k::table_for(k::Backend::kScalar);
    // sizes chosen to exercise full vectors plus every remainder-lane count
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 64u, 230u, 1001u}) {
      Bank bank(n, rng);
      std::vector<double> got(n), want(n);
      simd.poly5_frame(bank.raw.data(), n, bank.coeffs(), bank.center.data(),
                       bank.inv_half.data(), bank.lo.data(), bank.hi.data(), 0.0, 300.0,
                       got.data());
      ref.poly5_frame(bank.raw.data(), n, bank.coeffs(), bank.center.data(),
                      bank.inv_half.data(), bank.lo.data(), bank.hi.data(), 0.0, 300.0,
                      want.data());
      CHECK(bits_equal(got, want));

      simd.tare_subtract(bank.raw.data(), bank.center.data(), n, got.data());
      ref.tare_subtract(bank.raw.data(), bank.center.data(), n, want.data());
      CHECK(bits_equal(got, want));

      simd.facet_force(bank.coeff[0].data(), bank.coeff[1].data(), bank.coeff[2].data(),
                       bank.hi.data(), n, got.data());
      ref.facet_force(bank.coeff[0].data(), bank.coeff[1].data(), bank.coeff[2].data(),
                      bank.hi.data(), n, want.data());
      CHECK(bits_equal(got, want));
    }
  }
}

TEST_CASE("tare_subtract floors at zero") {
  const double p[] = {5.0, 2.0, 1.0};
  const double tare[] = {1.0, 2.0, 4.0};
  double out[3];
  k::table_for(k::Backend::kScalar).tare_subtract(p, tare, 3, out);
  CHECK(out[0] == 4.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
}

TEST_CASE("facet_force equals the edge-midpoint quadrature") {
  const double p0[] = {1.0}, p1[] = {2.0}, p2[] = {3.0}, area[] = {0.6};
  double out[1];
  k::table_for(k::Backend::kScalar).facet_force(p0, p1, p2, area, 1, out);
  // (A/3) * (1.5 + 2.5 + 2.0) = 0.2 * 6 = 1.2
  CHECK(out[0] == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("pairwise_sum agrees with direct summation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 100u, 1023u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    double direct = 0.0;
    for (double v : x) direct += v;
    CHECK(k::pairwise_sum(x.data(), n) == doctest::Approx(direct).epsilon(1e-12));
  }
  std::vector<double> ones(501, 1.0);
  CHECK(k::pairwise_sum(ones.data(), ones.size()) == 501.0);
}

TEST_CASE("active backend can be pinned to scalar and restored") {
  const auto before = k::active_backend();
  k::set_backend(k::Backend::kScalar);
  CHECK(k::active_backend() == k::Backend::kScalar);
  k::set_backend(before);
  CHECK(k::active_backend() == before);
}
