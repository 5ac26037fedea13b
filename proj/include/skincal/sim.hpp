// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skincal/rng.hpp"

namespace skincal {

/// Ground-truth response of one capacitive taxel. Raw counts start at the
/// rest reading r0 and drop toward r0 - sensitivity as pressure saturates the
/// dielectric; readings are inverted capacitance, so the curve is strictly
/// decreasing while sensitivity > 0.
struct TaxelResponseModel {
  double r0 = 240.0;           // rest reading, counts
  double sensitivity = 180.0;  // full-scale drop, counts (<= r0)
  double tau_p = 100.0;        // saturation constant, kPa
  bool is_cut = false;
  double hysteresis_tau_down = 5.0;  // fabric relaxation, seconds
  double noise_sigma = 0.5;          // counts
  double saturation_knee_kpa = 0.0;  // > 0: readings freeze above this pressure
};

/// Pressure transmitted to the skin once the bladder has wrapped it:
/// max(0, chamber - wrap_threshold).
double effective_pressure(double chamber_kpa, double wrap_threshold_kpa);

/// r0 - sensitivity * (1 - exp(-p/tau_p)), with the optional knee clamp.
double ground_truth_reading(const TaxelResponseModel& model, double p_eff_kpa);

/// Round half away from zero, clamp to the 8-bit range.
int quantize(double counts);

struct ChamberState {
  double commanded_kpa = 0.0;
  double actual_kpa = 0.0;
  double regulator_tau = 0.5;        // seconds
  double wrap_threshold_kpa = 2.0;
  double pressure_noise_sigma = 1.5; // kPa
  std::vector<double> fabric_kpa;    // per-taxel hysteresis memory
  std::uint64_t rng_seed = 0;
};

/// First-order regulator update over dt toward `commanded`; returns the
/// reported (noisy) pressure. Fabric state is advanced by read_taxels.
double step_chamber(ChamberState& state, double dt, double commanded_kpa, NoiseStream& noise);

/// Fabric hysteresis update plus readout. Rising pressure is tracked
/// instantly; falling pressure relaxes with the per-taxel time constant.
std::vector<int> read_taxels(ChamberState& state, std::span<const TaxelResponseModel> models,
                             std::span<const double> applied_kpa, double dt, NoiseStream& noise);
std::vector<int> read_taxels(ChamberState& state, std::span<const TaxelResponseModel> models,
                             double p_eff_kpa, double dt, NoiseStream& noise);

struct TaxelParamRanges {
  std::array<double, 2> r0{200.0, 250.0};
  std::array<double, 2> sensitivity{120.0, 200.0};
  std::array<double, 2> tau_p{60.0, 140.0};
  std::array<double, 2> cut_sensitivity{3.0, 5.0};
};

struct SimConfig {
  double ramp_rate = 2.0;       // kPa/s
  double max_pressure = 300.0;  // kPa, device limit 300
  double sample_rate = 10.0;    // Hz
  double regulator_tau = 0.5;
  double wrap_threshold_kpa = 2.0;
  double pressure_noise_sigma = 1.5;
  double noise_sigma = 0.5;
  double hysteresis_tau_down = 5.0;
  double saturation_knee_kpa = 0.0;  // 55 reproduces the vacuum-bag data set
  double baseline_hold_s = 1.0;
  double vent_tail_s = 5.0;
  double attain_margin_kpa = 0.01;
  double timeout_s = 0.0;  // 0 = derived from ramp rate
  std::uint64_t seed = 42;
  // Distinguishes acquisition sessions sharing one skin: the per-taxel
  // parameter draw is a function of the seed alone, while the noise streams
  // also mix in the session, so a later session sees the same sensors but
  // fresh noise.
  std::uint64_t session = 0;
  TaxelParamRanges ranges;
  std::optional<std::vector<TaxelResponseModel>> explicit_models;
};

/// Zeroes both noise sources ("off") or restores the stock ones ("paper").
SimConfig with_noise_preset(SimConfig cfg, std::string_view preset);

/// Owns chamber and taxel state plus the seeded noise streams. One stream per
/// noise source, so parameter draws, pressure noise, and taxel noise are
/// independent and reproducible.
class Simulator {
 public:
  struct Tick {
    double t_s = 0.0;
    double reported_kpa = 0.0;
    std::vector<int> raw;
  };

  Simulator(const SimConfig& cfg, std::size_t taxel_count,
            const std::vector<bool>& cut = {});

  /// Chamber-driven tick: regulator step toward `commanded`, then readout.
  Tick step_command(double commanded_kpa);

  /// Contact-driven tick (bladder bypassed): per-taxel applied pressure.
  Tick step_contact(std::span<const double> applied_kpa);

  void reset_fabric();
  double dt() const { return 1.0 / cfg_.sample_rate; }
  double time() const { return t_; }
  const SimConfig& config() const { return cfg_; }
  const std::vector<TaxelResponseModel>& models() const { return models_; }
  const ChamberState& chamber() const { return chamber_; }

 private:
  SimConfig cfg_;
  std::vector<TaxelResponseModel> models_;
  ChamberState chamber_;
  NoiseStream pressure_noise_;
  NoiseStream taxel_noise_;
  double t_ = 0.0;
};

}  // namespace skincal
