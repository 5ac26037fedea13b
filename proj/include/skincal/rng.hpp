// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace skincal {

/// Derives independent stream seeds from a master seed. Each noise source in
/// the simulator owns one stream so that adding draws to one source never
/// shifts another.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t tag) {
  // splitmix64 finalizer over master ^ golden-ratio-scaled tag
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable noise stream: mt19937_64 with explicit uniform and Box-Muller
/// Gaussian transforms. The transforms are spelled out here (instead of
/// std::*_distribution) so the byte stream is a documented function of the
/// seed rather than of the standard library version.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard Gaussian via Box-Muller; one spare value cached per pair.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double sigma) { return sigma <= 0.0 ? 0.0 : sigma * gaussian(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace skincal
