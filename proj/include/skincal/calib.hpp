// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace skincal {

struct CalibrationSample {
  double t_s = 0.0;
  double pressure_kpa = 0.0;  // reported chamber pressure (noisy)
  std::vector<int> raw;       // one count per taxel, 0..255
};

struct CalibrationLog {
  std::vector<CalibrationSample> samples;  // strictly increasing timestamps
  double sample_rate = 10.0;               // Hz
  nlohmann::ordered_json config_snapshot = nlohmann::ordered_json::object();
};

/// Ordered producer of acquisition samples. poll() is called once per sample
/// period and may return nothing when the producer missed a period.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::optional<CalibrationSample> poll() = 0;
  virtual void begin_vent() {}
};

struct AcquisitionParams {
  double max_pressure = 300.0;
  double sample_rate = 10.0;
  double attain_margin_kpa = 0.01;  // reported >= max - margin counts as attained
  double timeout_s = 600.0;
  double vent_tail_s = 5.0;
  int baseline_samples = 10;  // logged when max_pressure <= 0
};

/// Drives the source through ramp-up, detects first attainment of the target
/// pressure, vents, and returns the assembled log. Throws SourceStalled after
/// 10 consecutive missed periods, PressureNotReached past the timeout.
CalibrationLog run_calibration(const AcquisitionParams& params, SampleSource& source);

/// Trailing moving median (window 5) of the reported pressure series.
std::vector<double> smoothed_pressure(const CalibrationLog& log);

/// Prefix of the log up to the first global maximum of the smoothed pressure,
/// with samples more than 0.5 kPa below the running smoothed maximum dropped.
/// Throws EmptyLog.
std::vector<CalibrationSample> select_increasing_segment(const CalibrationLog& log);

/// One fitting point: pressure against the raw count that produced it.
struct PressureRawSample {
  double pressure_kpa = 0.0;
  double raw = 0.0;
};

/// Per-taxel quintic over the scaled count variable x = (C - center)/halfrange.
/// Evaluating this representation expands to the same quintic in C itself.
struct TaxelCalibration {
  std::array<double, 6> coeffs{};  // ascending degree
  double center = 0.0;
  double halfrange = 1.0;
  int raw_min = 0;
  int raw_max = 255;
  double fit_rmse = 0.0;  // kPa
  bool saturated = false;
};

struct CalibrationMap {
  std::vector<TaxelCalibration> taxels;
  double max_calibrated_pressure = 300.0;
  std::string geometry_hash;
  std::string created_at;  // informational; not serialized
};

/// Least-squares quintic through the samples, solved by Householder QR on the
/// scaled-count basis. Throws InsufficientLevels below 6 distinct raw values,
/// SingularSystem if the design matrix is rank deficient anyway.
TaxelCalibration fit_taxel(std::span<const PressureRawSample> samples);

struct PressureEstimate {
  double kpa = 0.0;
  bool extrapolated = false;  // raw outside the calibrated count range
};

/// Evaluates the calibration at a raw count. Counts outside the observed
/// range are clamped to the nearest bound and flagged; the result is clamped
/// to [0, max_calibrated_pressure].
PressureEstimate estimate_pressure(const TaxelCalibration& cal, double raw,
                                   double max_calibrated_pressure);

struct SaturationReport {
  bool saturated = false;
  std::optional<double> knee_kpa;
};

/// Saturation test on one taxel's increasing-segment series: flat reading
/// (< 1 count end to end) over the final 20% of the pressure span while that
/// window spans more than 10 kPa. The knee is the earliest pressure after
/// which the remaining smoothed-count change stays under 2 counts.
SaturationReport detect_saturation(std::span<const PressureRawSample> samples);

/// Collapses samples to one point per distinct raw count (mean pressure of
/// the level). Output sorted by raw ascending.
std::vector<PressureRawSample> aggregate_levels(std::span<const PressureRawSample> samples);

/// Per-taxel series from a segment, with the bladder wrap threshold removed
/// from the pressure axis: p -> max(0, p - wrap).
std::vector<PressureRawSample> taxel_series(std::span<const CalibrationSample> segment,
                                            std::size_t taxel, double wrap_threshold_kpa);

struct CalibrationOptions {
  double wrap_threshold_kpa = 2.0;
  bool aggregate_per_level = true;
  unsigned parallelism = 0;  // 0 = hardware concurrency
};

struct TaxelFitFailure {
  std::size_t taxel = 0;
  std::string reason;
};

struct CalibrationResult {
  CalibrationMap map;  // complete only when failures is empty
  std::vector<TaxelFitFailure> failures;
};

/// Fits every taxel of the segment (optionally in parallel; results are
/// independent of fitting order) and attaches saturation flags.
CalibrationResult calibrate_taxels(std::span<const CalibrationSample> segment,
                                   const CalibrationOptions& options,
                                   const std::string& geometry_hash);

/// Optional exponential moving average over per-taxel pressure estimates.
class EmaFilter {
 public:
  explicit EmaFilter(double alpha) : alpha_(alpha) {}
  void apply(std::span<double> estimates);
  void reset() { primed_ = false; }

 private:
  double alpha_;
  std::vector<double> state_;
  bool primed_ = false;
};

}  // namespace skincal
