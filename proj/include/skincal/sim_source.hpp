// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "skincal/calib.hpp"
#include "skincal/sim.hpp"

namespace skincal {

/// Adapts a Simulator to the acquisition sample stream. Commands the ramp
/// profile (baseline hold, linear ramp, vent) and routes every taxel frame
/// through the CAN-style codec so acquisition always exercises the full
/// encode/decode path.
class SimSource : public SampleSource {
 public:
  SimSource(Simulator& sim, double ramp_rate, double max_pressure, double baseline_hold_s);

  std::optional<CalibrationSample> poll() override;
  void begin_vent() override;

 private:
  Simulator* sim_;
  double ramp_rate_;
  double max_pressure_;
  double baseline_hold_s_;
  bool venting_ = false;
  std::uint8_t seq_ = 0;
};

}  // namespace skincal
