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
#include "skincal/io.hpp"

namespace skincal::report {

struct Series {
  std::string label;
  std::vector<std::array<double, 2>> points;
  std::string color = "#1f77b4";
  bool markers_only = false;
};

/// Minimal deterministic SVG line/scatter plot.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    std::span<const Series> series);

/// Average raw count against pressure over the increasing segment of a log.
/// Writes <stem>.csv (pressure_kpa,avg_raw) and <stem>.svg.
void write_response_curve(const std::filesystem::path& stem, const CalibrationLog& log);

/// One taxel's fitted curve with its fitting data points.
/// Writes <stem>.csv (raw,pressure_kpa,kind with kind in {data,fit}) and <stem>.svg.
void write_taxel_fit(const std::filesystem::path& stem, const CalibrationLog& log,
                     const CalibrationMap& map, std::size_t taxel, double wrap_threshold_kpa);

struct ForceComparePoint {
  double t_s = 0.0;
  double estimated_n = 0.0;
  double truth_n = 0.0;
};

/// Estimated force magnitude against the known applied force over time.
/// Writes <stem>.csv (t_s,estimated_N,truth_N) and <stem>.svg.
void write_force_compare(const std::filesystem::path& stem,
                         std::span<const ForceComparePoint> points);

}  // namespace skincal::report
