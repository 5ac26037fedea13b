// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/sim_source.hpp"

#include <algorithm>

#include "skincal/wire.hpp"

namespace skincal {

SimSource::SimSource(Simulator& sim, double ramp_rate, double max_pressure,
                     double baseline_hold_s)
    : sim_(&sim),
      ramp_rate_(ramp_rate),
      max_pressure_(max_pressure),
      baseline_hold_s_(baseline_hold_s) {}

void SimSource::begin_vent() { venting_ = true; }

std::optional<CalibrationSample> SimSource::poll() {
  const double t = sim_->time();
  double commanded = 0.0;
  if (!venting_ && t >= baseline_hold_s_) {
    commanded = std::min(ramp_rate_ * (t - baseline_hold_s_), max_pressure_);
  }
  Simulator::Tick tick = sim_->step_command(commanded);

  CalibrationSample sample;
  sample.t_s = tick.t_s;
  sample.pressure_kpa = tick.reported_kpa;
  sample.raw.resize(tick.raw.size());

  // counts travel module by module through the frame codec
  const std::size_t n = tick.raw.size();
  const std::uint8_t seq = seq_;
  seq_ = (seq_ + 1) & 0x7F;
  std::size_t i = 0;
  int module_id = 0;
  const std::array<std::uint8_t, 2> temps{128, 128};
  for (; i + 10 <= n && module_id <= 127; i += 10, ++module_id) {
    std::array<std::uint8_t, 10> counts;
    for (int k = 0; k < 10; ++k) counts[k] = static_cast<std::uint8_t>(tick.raw[i + k]);
    const auto frames = wire::encode_module(module_id, counts, temps, seq);
    const wire::DecodedModule decoded = wire::decode_module(frames[0], frames[1]);
    for (int k = 0; k < 10; ++k) sample.raw[i + k] = decoded.taxel_counts[k];
  }
  for (; i < n; ++i) sample.raw[i] = tick.raw[i];  // tail not forming a full module
  return sample;
}

}  // namespace skincal
