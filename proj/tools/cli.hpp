// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skincal/force.hpp"
#include "skincal/io.hpp"
#include "skincal/sim.hpp"

namespace skincal::cli {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> noise;
  std::optional<std::string> filter;
};

/// Run configuration with all referenced artifacts loaded and overrides
/// applied, ready to drive a command.
struct ResolvedRun {
  io::RunConfig run;
  TaxelLayout layout;
  SkinMesh mesh;
  SimConfig sim;  // seed, ramp, noise preset already applied
  double ramp_rate = 2.0;
  std::vector<io::TrialSpec> trials;
  std::filesystem::path out_dir;
  std::optional<double> ema_alpha;
};

ResolvedRun resolve_run(const Overrides& overrides);

/// Stock validation set: ten masses from 0.2 to 2.0 kg, each footprint sized
/// so the applied pressure lands near the middle of the calibrated range.
std::vector<io::TrialSpec> default_trials(const SkinMesh& mesh);

struct TrialResult {
  io::TrialSpec spec;
  double truth_n = 0.0;
  double mean_estimate_n = 0.0;
  double relative_error = 0.0;
  double applied_kpa = 0.0;
  std::size_t covered_taxels = 0;
  std::vector<io::ForceTraceRow> trace;
};

struct ValidationOutcome {
  std::vector<TrialResult> trials;
  double mean_relative_error = 0.0;
};

/// Masses-on-skin protocol: tare at zero load, then apply each trial's
/// footprint pressure through the simulator and stream force estimates.
ValidationOutcome run_validation(const SkinMesh& mesh, const CalibrationMap& map, Simulator& sim,
                                 std::span<const io::TrialSpec> trials,
                                 std::optional<double> ema_alpha);

int cmd_simulate(const Overrides& overrides, bool emit_configs);
int cmd_calibrate(const Overrides& overrides);
int cmd_validate(const Overrides& overrides, const std::optional<std::string>& calibration_path,
                 const std::optional<std::string>& trials_path);
int cmd_report(const Overrides& overrides, const std::optional<std::string>& log_path,
               const std::optional<std::string>& calibration_path, int taxel,
               const std::optional<std::string>& summary_path);

/// Parses arguments (without program name) and dispatches. Exit codes:
/// 0 success, 2 domain error, 3 I/O failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace skincal::cli
