// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/calib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <set>
#include <thread>

#include "skincal/errors.hpp"
#include "skincal/kernels.hpp"

namespace skincal {

namespace {

constexpr int kMaxStalledPolls = 10;
constexpr double kBackslideGuardKpa = 0.5;
constexpr int kMedianWindow = 5;
constexpr double kSaturationWindowFrac = 0.2;
constexpr double kMinWindowRiseKpa = 10.0;
constexpr double kFlatCountThreshold = 1.0;
constexpr double kKneeRemainingCounts = 2.0;

double lower_median(std::vector<double> v) {
  const auto mid = v.begin() + (v.size() - 1) / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::vector<double> trailing_median(const std::vector<double>& x, int window) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    out[i] = lower_median(std::vector<double>(x.begin() + lo, x.begin() + i + 1));
  }
  return out;
}

}  // namespace

CalibrationLog run_calibration(const AcquisitionParams& params, SampleSource& source) {
  CalibrationLog log;
  log.sample_rate = params.sample_rate;
  const double period = 1.0 / params.sample_rate;

  int stalls = 0;
  auto take = [&]() -> const CalibrationSample* {
    while (true) {
      if (auto s = source.poll()) {
        stalls = 0;
        log.samples.push_back(std::move(*s));
        return &log.samples.back();
      }
      if (++stalls >= kMaxStalledPolls) {
        throw SourceStalled("no sample within 10 sample periods");
      }
    }
  };

  if (params.max_pressure <= 0.0) {
    for (int i = 0; i < std::max(1, params.baseline_samples); ++i) take();
    return log;
  }

  double elapsed = 0.0;
  while (true) {
    const CalibrationSample* s = take();
    elapsed += period;
    if (s->pressure_kpa >= params.max_pressure - params.attain_margin_kpa) break;
    if (elapsed > params.timeout_s) {
      throw PressureNotReached("target pressure not attained within timeout");
    }
  }

  source.begin_vent();
  const int vent_samples = static_cast<int>(std::lround(params.vent_tail_s * params.sample_rate));
  for (int i = 0; i < vent_samples; ++i) take();
  return log;
}

std::vector<double> smoothed_pressure(const CalibrationLog& log) {
  std::vector<double> p(log.samples.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = log.samples[i].pressure_kpa;
  return trailing_median(p, kMedianWindow);
}

std::vector<CalibrationSample> select_increasing_segment(const CalibrationLog& log) {
  if (log.samples.empty()) throw EmptyLog("calibration log is empty");
  const std::vector<double> s = smoothed_pressure(log);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[peak]) peak = i;
  }

  std::vector<CalibrationSample> out;
  out.reserve(peak + 1);
  double run_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= peak; ++i) {
    run_max = std::max(run_max, s[i]);
    if (s[i] > run_max - kBackslideGuardKpa) out.push_back(log.samples[i]);
  }
  return out;
}

TaxelCalibration fit_taxel(std::span<const PressureRawSample> samples) {
  std::set<double> levels;
  for (const auto& s : samples) levels.insert(s.raw);
  if (levels.size() < 6) {
    throw InsufficientLevels("only " + std::to_string(levels.size()) +
                             " distinct raw levels; at least 6 required");
  }

  const double lo = *levels.begin();
  const double hi = *levels.rbegin();
  TaxelCalibration cal;
  cal.raw_min = static_cast<int>(std::llround(lo));
  cal.raw_max = static_cast<int>(std::llround(hi));
  cal.center = 0.5 * (lo + hi);
  cal.halfrange = 0.5 * (hi - lo);

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 6);
  Eigen::VectorXd target(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = (samples[k].raw - cal.center) / cal.halfrange;
    double pw = 1.0;
    for (int j = 0; j < 6; ++j) {
      design(k, j) = pw;
      pw *= x;
    }
    target(k) = samples[k].pressure_kpa;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 6) {
    throw SingularSystem("design matrix rank deficient despite distinct levels");
  }
  const Eigen::VectorXd c = qr.solve(target);
  for (int j = 0; j < 6; ++j) cal.coeffs[j] = c(j);
  cal.fit_rmse = std::sqrt((design * c - target).squaredNorm() / static_cast<double>(n));
  return cal;
}

PressureEstimate estimate_pressure(const TaxelCalibration& cal, double raw,
                                   double max_calibrated_pressure) {
  PressureEstimate est;
  const auto lo = static_cast<double>(cal.raw_min);
  const auto hi = static_cast<double>(cal.raw_max);
  est.extrapolated = raw < lo || raw > hi;
  const double inv_half = 1.0 / cal.halfrange;
  const double* cptr[6] = {&cal.coeffs[0], &cal.coeffs[1], &cal.coeffs[2],
                           &cal.coeffs[3], &cal.coeffs[4], &cal.coeffs[5]};
  est.kpa = kernels::detail::poly5_one(raw, cptr, 0, cal.center, inv_half, lo, hi, 0.0,
                                       max_calibrated_pressure);
  return est;
}

SaturationReport detect_saturation(std::span<const PressureRawSample> samples) {
  SaturationReport rep;
  if (samples.size() < 2) return rep;

  double p_min = samples[0].pressure_kpa, p_max = samples[0].pressure_kpa;
  for (const auto& s : samples) {
    p_min = std::min(p_min, s.pressure_kpa);
    p_max = std::max(p_max, s.pressure_kpa);
  }
  const double window_lo = p_min + (1.0 - kSaturationWindowFrac) * (p_max - p_min);
  if (p_max - window_lo <= kMinWindowRiseKpa) return rep;

  std::vector<double> window_raw;
  for (const auto& s : samples) {
    if (s.pressure_kpa >= window_lo) window_raw.push_back(s.raw);
  }
  if (window_raw.size() < 2) return rep;
  const std::size_t block = std::max<std::size_t>(1, window_raw.size() / 10);
  const double head = lower_median(
      std::vector<double>(window_raw.begin(), window_raw.begin() + block));
  const double tail =
      lower_median(std::vector<double>(window_raw.end() - block, window_raw.end()));
  rep.saturated = std::abs(head - tail) < kFlatCountThreshold;
  if (!rep.saturated) return rep;

  std::vector<double> raws(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) raws[i] = samples[i].raw;
  const std::vector<double> smooth = trailing_median(raws, kMedianWindow);
  const double final_raw = smooth.back();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::abs(smooth[i] - final_raw) < kKneeRemainingCounts) {
      rep.knee_kpa = samples[i].pressure_kpa;
      break;
    }
  }
  return rep;
}

std::vector<PressureRawSample> aggregate_levels(std::span<const PressureRawSample> samples) {
  std::map<double, std::pair<double, std::size_t>> levels;
  for (const auto& s : samples) {
    auto& [sum, count] = levels[s.raw];
    sum += s.pressure_kpa;
    ++count;
  }
  std::vector<PressureRawSample> out;
  out.reserve(levels.size());
  for (const auto& [raw, acc] : levels) {
    out.push_back({acc.first / static_cast<double>(acc.second), raw});
  }
  return out;
}

std::vector<PressureRawSample> taxel_series(std::span<const CalibrationSample> segment,
                                            std::size_t taxel, double wrap_threshold_kpa) {
  std::vector<PressureRawSample> out;
  out.reserve(segment.size());
  for (const auto& s : segment) {
    out.push_back({std::max(0.0, s.pressure_kpa - wrap_threshold_kpa),
                   static_cast<double>(s.raw[taxel])});
  }
  return out;
}

CalibrationResult calibrate_taxels(std::span<const CalibrationSample> segment,
                                   const CalibrationOptions& options,
                                   const std::string& geometry_hash) {
  CalibrationResult result;
  if (segment.empty()) throw EmptyLog("empty increasing segment");
  const std::size_t n_taxels = segment[0].raw.size();
  result.map.taxels.resize(n_taxels);
  result.map.geometry_hash = geometry_hash;

  double max_eff = 0.0;
  for (const auto& s : segment) {
    max_eff = std::max(max_eff, s.pressure_kpa - options.wrap_threshold_kpa);
  }
  result.map.max_calibrated_pressure = std::max(0.0, max_eff);

  std::vector<std::optional<TaxelFitFailure>> failures(n_taxels);
  auto fit_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto series = taxel_series(segment, i, options.wrap_threshold_kpa);
      const auto points =
          options.aggregate_per_level ? aggregate_levels(series) : series;
      try {
        TaxelCalibration cal = fit_taxel(points);
        cal.saturated = detect_saturation(series).saturated;
        result.map.taxels[i] = cal;
      } catch (const Error& e) {
        failures[i] = TaxelFitFailure{i, e.what()};
      }
    }
  };

  unsigned workers = options.parallelism ? options.parallelism
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n_taxels));
  if (workers <= 1) {
    fit_range(0, n_taxels);
  } else {
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (n_taxels + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n_taxels, begin + chunk);
      if (begin >= end) break;
      tasks.push_back(std::async(std::launch::async, fit_range, begin, end));
    }
    for (auto& t : tasks) t.get();
  }

  for (auto& f : failures) {
    if (f) result.failures.push_back(*f);
  }
  return result;
}

void EmaFilter::apply(std::span<double> estimates) {
  if (!primed_ || state_.size() != estimates.size()) {
    state_.assign(estimates.begin(), estimates.end());
    primed_ = true;
    return;
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    state_[i] = alpha_ * estimates[i] + (1.0 - alpha_) * state_[i];
    estimates[i] = state_[i];
  }
}

}  // namespace skincal
