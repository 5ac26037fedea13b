// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "skincal/calib.hpp"
#include "skincal/force.hpp"
#include "skincal/geometry.hpp"
#include "skincal/sim.hpp"

namespace skincal::io {

// Layout file: versioned JSON with one entry per triangular module.
TaxelLayout load_layout(const std::filesystem::path& path);
void save_layout(const std::filesystem::path& path, const TaxelLayout& layout);

// Simulator configuration, including per-taxel parameter ranges or explicit
// models.
SimConfig load_sim_config(const std::filesystem::path& path);
void save_sim_config(const std::filesystem::path& path, const SimConfig& cfg);
nlohmann::ordered_json sim_config_json(const SimConfig& cfg);

// Calibration map: versioned JSON, one object per taxel.
CalibrationMap load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const CalibrationMap& map);

// Acquisition log CSV: header t_s,pressure_kpa,taxel_0,...,taxel_{N-1}, one
// row per sample, UTF-8, LF line endings.
void write_log_csv(const std::filesystem::path& path, const CalibrationLog& log);
CalibrationLog read_log_csv(const std::filesystem::path& path);

// Force trace CSV: t_s,fx_N,fy_N,fz_N,magnitude_N,extrapolated.
struct ForceTraceRow {
  double t_s = 0.0;
  double fx_n = 0.0, fy_n = 0.0, fz_n = 0.0;
  double magnitude_n = 0.0;
  bool extrapolated = false;
};
void write_force_trace_csv(const std::filesystem::path& path,
                           std::span<const ForceTraceRow> rows);
std::vector<ForceTraceRow> read_force_trace_csv(const std::filesystem::path& path);

// Validation trial specs.
struct TrialSpec {
  double mass_kg = 1.0;
  std::array<double, 2> center{0.0, 0.0};  // (u, v) meters
  double radius_m = 0.01;
  double duration_s = 5.0;
};
std::vector<TrialSpec> load_trials(const std::filesystem::path& path);
void save_trials(const std::filesystem::path& path, std::span<const TrialSpec> trials);

// Top-level run configuration consumed by the CLI. Paths may name builtin
// presets ("builtin:forearm23", "builtin:default"). Optional fields override
// the simulator config when present; command-line flags override both.
struct RunConfig {
  std::string layout = "builtin:forearm23";
  std::string sim_config = "builtin:default";
  std::string trials = "builtin:default";
  std::optional<double> ramp_rate;
  std::optional<double> max_pressure;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string noise = "paper";  // paper | off
  std::string filter = "off";   // off | ema:<alpha>
};
RunConfig load_run_config(const std::filesystem::path& path);

/// ISO-8601 UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible output.
std::string timestamp_utc();

}  // namespace skincal::io
