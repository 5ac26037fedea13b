// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/sim.hpp"

#include <algorithm>
#include <cmath>

#include "skincal/errors.hpp"

namespace skincal {

namespace {

enum StreamTag : std::uint64_t { kParamStream = 0, kPressureStream = 1, kTaxelStream = 2 };

constexpr double kDeviceLimitKpa = 300.0;

}  // namespace

double effective_pressure(double chamber_kpa, double wrap_threshold_kpa) {
  return std::max(0.0, chamber_kpa - wrap_threshold_kpa);
}

double ground_truth_reading(const TaxelResponseModel& model, double p_eff_kpa) {
  double p = p_eff_kpa;
  if (model.saturation_knee_kpa > 0.0) p = std::min(p, model.saturation_knee_kpa);
  return model.r0 - model.sensitivity * (1.0 - std::exp(-p / model.tau_p));
}

int quantize(double counts) {
  const long r = std::lround(counts);
  return static_cast<int>(std::clamp(r, 0L, 255L));
}

double step_chamber(ChamberState& state, double dt, double commanded_kpa, NoiseStream& noise) {
  state.commanded_kpa = std::clamp(commanded_kpa, 0.0, kDeviceLimitKpa);
  const double k = 1.0 - std::exp(-dt / state.regulator_tau);
  state.actual_kpa += (state.commanded_kpa - state.actual_kpa) * k;
  state.actual_kpa = std::max(0.0, state.actual_kpa);
  return state.actual_kpa + noise.gaussian(state.pressure_noise_sigma);
}

std::vector<int> read_taxels(ChamberState& state, std::span<const TaxelResponseModel> models,
                             std::span<const double> applied_kpa, double dt, NoiseStream& noise) {
  std::vector<int> out(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    const TaxelResponseModel& m = models[i];
    const double p = applied_kpa[i];
    double& f = state.fabric_kpa[i];
    if (p >= f) {
      f = p;
    } else {
      f = p + (f - p) * std::exp(-dt / m.hysteresis_tau_down);
    }
    out[i] = quantize(ground_truth_reading(m, f) + noise.gaussian(m.noise_sigma));
  }
  return out;
}

std::vector<int> read_taxels(ChamberState& state, std::span<const TaxelResponseModel> models,
                             double p_eff_kpa, double dt, NoiseStream& noise) {
  const std::vector<double> applied(models.size(), p_eff_kpa);
  return read_taxels(state, models, applied, dt, noise);
}

SimConfig with_noise_preset(SimConfig cfg, std::string_view preset) {
  if (preset == "off") {
    cfg.pressure_noise_sigma = 0.0;
    cfg.noise_sigma = 0.0;
  } else if (preset == "paper") {
    cfg.pressure_noise_sigma = 1.5;
    cfg.noise_sigma = 0.5;
  } else {
    throw Error("unknown noise preset: " + std::string(preset));
  }
  return cfg;
}

Simulator::Simulator(const SimConfig& cfg, std::size_t taxel_count,
                     const std::vector<bool>& cut)
    : cfg_(cfg),
      pressure_noise_(stream_seed(cfg.seed, kPressureStream + 16 * cfg.session)),
      taxel_noise_(stream_seed(cfg.seed, kTaxelStream + 16 * cfg.session)) {
  if (cfg_.sample_rate <= 0.0) throw Error("sample_rate must be positive");
  if (cfg_.max_pressure > kDeviceLimitKpa) throw Error("max_pressure above the 300 kPa limit");

  if (cfg_.explicit_models) {
    models_ = *cfg_.explicit_models;
    if (models_.size() != taxel_count) {
      throw Error("explicit taxel model count does not match the layout");
    }
  } else {
    NoiseStream params(stream_seed(cfg_.seed, kParamStream));
    models_.reserve(taxel_count);
    for (std::size_t i = 0; i < taxel_count; ++i) {
      TaxelResponseModel m;
      m.is_cut = i < cut.size() && cut[i];
      m.r0 = params.uniform(cfg_.ranges.r0[0], cfg_.ranges.r0[1]);
      m.sensitivity = m.is_cut
                          ? params.uniform(cfg_.ranges.cut_sensitivity[0],
                                           cfg_.ranges.cut_sensitivity[1])
                          : params.uniform(cfg_.ranges.sensitivity[0], cfg_.ranges.sensitivity[1]);
      m.tau_p = params.uniform(cfg_.ranges.tau_p[0], cfg_.ranges.tau_p[1]);
      m.hysteresis_tau_down = cfg_.hysteresis_tau_down;
      m.noise_sigma = cfg_.noise_sigma;
      m.saturation_knee_kpa = cfg_.saturation_knee_kpa;
      models_.push_back(m);
    }
  }

  chamber_.regulator_tau = cfg_.regulator_tau;
  chamber_.wrap_threshold_kpa = cfg_.wrap_threshold_kpa;
  chamber_.pressure_noise_sigma = cfg_.pressure_noise_sigma;
  chamber_.fabric_kpa.assign(taxel_count, 0.0);
  chamber_.rng_seed = cfg_.seed;
}

Simulator::Tick Simulator::step_command(double commanded_kpa) {
  Tick tick;
  tick.reported_kpa = step_chamber(chamber_, dt(), commanded_kpa, pressure_noise_);
  const double p_eff = effective_pressure(chamber_.actual_kpa, chamber_.wrap_threshold_kpa);
  tick.raw = read_taxels(chamber_, models_, p_eff, dt(), taxel_noise_);
  tick.t_s = t_;
  t_ += dt();
  return tick;
}

Simulator::Tick Simulator::step_contact(std::span<const double> applied_kpa) {
  Tick tick;
  tick.reported_kpa = 0.0;
  tick.raw = read_taxels(chamber_, models_, applied_kpa, dt(), taxel_noise_);
  tick.t_s = t_;
  t_ += dt();
  return tick;
}

void Simulator::reset_fabric() {
  std::fill(chamber_.fabric_kpa.begin(), chamber_.fabric_kpa.end(), 0.0);
}

}  // namespace skincal
