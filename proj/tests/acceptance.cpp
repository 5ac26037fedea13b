// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance suite. Each test prints one PASS/FAIL line so a run
// reads as a checklist; thresholds are asserted at their stated values.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "skincal/calib.hpp"
#include "skincal/force.hpp"
#include "skincal/geometry.hpp"
#include "skincal/io.hpp"
#include "skincal/sim.hpp"
#include "skincal/sim_source.hpp"
#include "skincal/wire.hpp"

using namespace skincal;
namespace fs = std::filesystem;

namespace {

void verdict(bool ok, const char* fmt, ...) {
  std::printf("[%s] ", ok ? "PASS" : "FAIL");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PipelineRun {
  SkinMesh mesh;
  CalibrationLog log;
  std::vector<CalibrationSample> segment;
  CalibrationResult calibration;
  cli::ValidationOutcome validation;
};

// full acquisition -> segment -> fit -> masses-on-skin validation
PipelineRun run_pipeline(const TaxelLayout& layout, SimConfig cfg, bool validate = true) {
  PipelineRun run;
  run.mesh = build_mesh(layout);
  Simulator sim(cfg, run.mesh.taxel_count(), run.mesh.cut);
  SimSource source(sim, cfg.ramp_rate, cfg.max_pressure, cfg.baseline_hold_s);
  AcquisitionParams ap;
  ap.max_pressure = cfg.max_pressure;
  ap.sample_rate = cfg.sample_rate;
  ap.attain_margin_kpa = cfg.attain_margin_kpa;
  ap.vent_tail_s = cfg.vent_tail_s;
  ap.timeout_s = cfg.baseline_hold_s + cfg.max_pressure / cfg.ramp_rate + 60.0;
  run.log = run_calibration(ap, source);
  run.segment = select_increasing_segment(run.log);
  CalibrationOptions opt;
  opt.wrap_threshold_kpa = cfg.wrap_threshold_kpa;
  run.calibration = calibrate_taxels(run.segment, opt, run.mesh.geometry_hash);
  if (validate && run.calibration.failures.empty()) {
    SimConfig vcfg = cfg;
    vcfg.session = 1;
    Simulator contact(vcfg, run.mesh.taxel_count(), run.mesh.cut);
    run.validation = cli::run_validation(run.mesh, run.calibration.map, contact,
                                         cli::default_trials(run.mesh), std::nullopt);
  }
  return run;
}

long double eval_poly(const std::array<long double, 6>& a, long double c) {
  long double acc = 0.0L;
  for (int k = 5; k >= 0; --k) acc = acc * c + a[k];
  return acc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("skincal_acceptance_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("1. fit recovery: noise-free quintics are reproduced to 1e-6 kPa RMS") {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_rms = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::array<long double, 6> gen{40.0L * u(rng), 1.0L * u(rng), 1e-2L * u(rng),
                                         1e-4L * u(rng), 1e-6L * u(rng), 1e-9L * u(rng)};
    const int levels = 7 + static_cast<int>(rng() % 34);
    const int lo = 20 + static_cast<int>(rng() % 40);
    const int step = 1 + static_cast<int>(rng() % 5);
    std::vector<PressureRawSample> samples;
    for (int k = 0; k < levels; ++k) {
      const double c = lo + k * step;
      samples.push_back({static_cast<double>(eval_poly(gen, c)), c});
    }
    const TaxelCalibration cal = fit_taxel(samples);
    long double ss = 0.0L;
    for (const auto& s : samples) {
      const double got = estimate_pressure(cal, s.raw, 1e18).kpa;
      const long double r = got - static_cast<long double>(s.pressure_kpa);
      ss += r * r;
    }
    worst_rms = std::max(worst_rms,
                         std::sqrt(static_cast<double>(ss) / static_cast<double>(levels)));
  }
  const double dt = seconds_since(t0);
  const bool ok = worst_rms <= 1e-6 && dt < 1.0;
  verdict(ok, "1. fit recovery: worst RMS %.3ter kPa (<= 1e-6), runtime %.3f s (< 1)", worst_rms,
          dt);
  CHECK(worst_rms <= 1e-6);
  CHECK(dt < 1.0);
}

TEST_CASE("2. scaled replication: 230 taxels, 10 masses, noisy <= 15%, clean <= 2%, < 60 s") {
  const auto t0 = std::chrono::steady_clock::now();
  const TaxelLayout layout = make_strip_layout(23);

  SimConfig noisy = with_noise_preset(SimConfig{}, "paper");
  noisy.seed = 42;
  const PipelineRun noisy_run = run_pipeline(layout, noisy);
  REQUIRE(noisy_run.calibration.failures.empty());
  REQUIRE(noisy_run.mesh.taxel_count() == 230);
  REQUIRE(noisy_run.validation.trials.size() == 10);
  const double noisy_err = noisy_run.validation.mean_relative_error;

  SimConfig clean = with_noise_preset(noisy, "off");
  const PipelineRun clean_run = run_pipeline(layout, clean);
  REQUIRE(clean_run.calibration.failures.empty());
  const double clean_err = clean_run.validation.mean_relative_error;

  const double dt = seconds_since(t0);
  const bool ok = noisy_err <= 0.15 && clean_err <= 0.02 && dt < 60.0;
  verdict(ok,
          "2. replication: mean rel err %.4f noisy (<= 0.15), %.4f noise-free (<= 0.02), "
          "pipeline %.2f s (< 60)",
          noisy_err, clean_err, dt);
  CHECK(noisy_err <= 0.15);
  CHECK(clean_err <= 0.02);
  CHECK(dt < 60.0);
}

TEST_CASE("3. saturation: device mode clean for non-cut taxels, vacuum knee in [45, 65] kPa") {
  TaxelLayout layout = make_strip_layout(23);
  layout.triangles[0].cut_mask[2] = true;
  layout.triangles[5].cut_mask[7] = true;

  SimConfig device = with_noise_preset(SimConfig{}, "paper");
  device.seed = 42;
  const PipelineRun dev = run_pipeline(layout, device, false);

  std::size_t false_positives = 0, cut_detected = 0, cut_total = 0;
  for (std::size_t i = 0; i < dev.mesh.taxel_count(); ++i) {
    const auto rep = detect_saturation(taxel_series(dev.segment, i, device.wrap_threshold_kpa));
    if (dev.mesh.cut[i]) {
      ++cut_total;
      cut_detected += rep.saturated ? 1 : 0;
    } else if (rep.saturated) {
      ++false_positives;
    }
  }

  SimConfig vacuum = device;
  vacuum.saturation_knee_kpa = 55.0;
  const PipelineRun vac = run_pipeline(layout, vacuum, false);
  std::size_t knees_in_band = 0, non_cut = 0;
  double knee_lo = 1e9, knee_hi = -1e9;
  for (std::size_t i = 0; i < vac.mesh.taxel_count(); ++i) {
    if (vac.mesh.cut[i]) continue;
    ++non_cut;
    const auto rep = detect_saturation(taxel_series(vac.segment, i, vacuum.wrap_threshold_kpa));
    if (rep.saturated && rep.knee_kpa && *rep.knee_kpa >= 45.0 && *rep.knee_kpa <= 65.0) {
      ++knees_in_band;
    }
    if (rep.knee_kpa) {
      knee_lo = std::min(knee_lo, *rep.knee_kpa);
      knee_hi = std::max(knee_hi, *rep.knee_kpa);
    }
  }

  const bool ok = false_positives == 0 && cut_detected == cut_total && knees_in_band == non_cut;
  verdict(ok,
          "3. saturation: device-mode false positives %zu/228 (= 0), vacuum knees in [45,65]: "
          "%zu/%zu (range %.1f..%.1f kPa)",
          false_positives, knees_in_band, non_cut, knee_lo, knee_hi);
  CHECK(false_positives == 0);
  CHECK(cut_detected == cut_total);
  CHECK(knees_in_band == non_cut);
}

TEST_CASE("4. force integral: constant field exact to 1e-10, affine to 1e-6 vs dense grid") {
  std::vector<Eigen::Vector2d> pts;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) pts.push_back({0.1 * i / 3.0, 0.1 * j / 3.0});
  }
  const SkinMesh mesh = build_mesh_from_points(pts);
  REQUIRE(std::abs(mesh.total_area() - 0.01) <= 1e-12);

  PressureField constant{&mesh, std::vector<double>(16, 10.0), false};
  const ForceEstimate fc = integrate_force(constant);
  const double const_err = (fc.force_n - Eigen::Vector3d(0.0, 0.0, 100.0)).norm() / 100.0;

  const double alpha = 8.0, beta = 220.0, gamma = -90.0;
  PressureField affine{&mesh, {}, false};
  for (const auto& p : mesh.taxel_positions) {
    affine.taxel_kpa.push_back(alpha + beta * p.x() + gamma * p.y());
  }
  const ForceEstimate fa = integrate_force(affine);
  const int n = 1000;
  long double acc = 0.0L;
  const long double h = 0.1L / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      acc += alpha + beta * static_cast<double>((i + 0.5L) * h) +
             gamma * static_cast<double>((j + 0.5L) * h);
    }
  }
  const double oracle = static_cast<double>(acc * h * h) * 1000.0;
  const double affine_err = std::abs(fa.force_n.z() - oracle) / std::abs(oracle);

  const bool ok = const_err <= 1e-10 && affine_err <= 1e-6;
  verdict(ok, "4. force integral: constant rel err %.2e (<= 1e-10), affine vs grid %.2e (<= 1e-6)",
          const_err, affine_err);
  CHECK(const_err <= 1e-10);
  CHECK(affine_err <= 1e-6);
}

TEST_CASE("5. segment extraction equals the argmax prefix on 1000 random ramp+vent logs") {
  std::mt19937_64 rng(1717);
  std::uniform_real_distribution<double> rate_d(0.5, 8.0), max_d(30.0, 300.0), tau_d(0.3, 0.8);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CalibrationLog log;
    double v = 0.0, t = 0.0;
    const double rate = rate_d(rng), maxp = max_d(rng), vent_tau = tau_d(rng);
    const int hold = static_cast<int>(rng() % 12);
    for (int i = 0; i < hold; ++i) {
      log.samples.push_back({t, 0.0, {0}});
      t += 0.1;
    }
    while (v < maxp) {
      log.samples.push_back({t, v, {0}});
      v += rate * 0.1;
      t += 0.1;
    }
    log.samples.push_back({t, maxp, {0}});
    t += 0.1;
    const int vent = 10 + static_cast<int>(rng() % 60);
    v = maxp;
    for (int i = 0; i < vent; ++i) {
      v *= std::exp(-0.1 / vent_tau);
      log.samples.push_back({t, v, {0}});
      t += 0.1;
    }

    std::size_t argmax = 0;
    for (std::size_t i = 1; i < log.samples.size(); ++i) {
      if (log.samples[i].pressure_kpa > log.samples[argmax].pressure_kpa) argmax = i;
    }
    const auto segment = select_increasing_segment(log);
    bool match = segment.size() == argmax + 1;
    for (std::size_t i = 0; match && i < segment.size(); ++i) {
      match = segment[i].t_s == log.samples[i].t_s;
    }
    if (!match) ++failures;
  }
  verdict(failures == 0, "5. segment extraction: %zu/1000 mismatches against brute-force argmax",
          failures);
  CHECK(failures == 0);
}

TEST_CASE("6. codec round-trips: 10^4 randomized cases per codec, zero failures") {
  std::mt19937_64 rng(33);
  std::size_t frame_fail = 0, serial_fail = 0, volt_fail = 0;

  for (int it = 0; it < 10000; ++it) {
    wire::DecodedModule in;
    in.module_id = static_cast<int>(rng() % 128);
    for (auto& v : in.taxel_counts) v = static_cast<std::uint8_t>(rng());
    for (auto& v : in.temps) v = static_cast<std::uint8_t>(rng());
    in.seq = static_cast<std::uint8_t>(rng() % 128);
    const auto frames = wire::encode_module(in.module_id, in.taxel_counts, in.temps, in.seq);
    if (!(wire::decode_module(frames[0], frames[1]) == in)) ++frame_fail;
  }

  for (int it = 0; it < 10000; ++it) {
    wire::RegulatorMsg in;
    in.kind = (rng() & 1) ? wire::RegulatorMsgKind::kSet : wire::RegulatorMsgKind::kActual;
    in.pressure_millikpa = static_cast<std::uint32_t>(rng() % 300001);
    if (!(wire::decode_regulator(wire::encode_regulator(in)) == in)) ++serial_fail;
  }

  std::uniform_real_distribution<double> u(0.0, 300.0);
  for (int it = 0; it < 10000; ++it) {
    const double kpa = u(rng);
    const double back = wire::adc_volts_to_pressure(
        wire::divider_3x(wire::amplifier_3x(wire::pressure_to_dac_volts(kpa))));
    if (std::abs(back - kpa) > 1e-9) ++volt_fail;
  }

  const bool ok = frame_fail == 0 && serial_fail == 0 && volt_fail == 0;
  verdict(ok, "6. codec round-trips: frames %zu, serial %zu, voltage %zu failures (all = 0)",
          frame_fail, serial_fail, volt_fail);
  CHECK(frame_fail == 0);
  CHECK(serial_fail == 0);
  CHECK(volt_fail == 0);
}

TEST_CASE("7. hysteresis: fitting the decreasing segment is strictly worse") {
  const TaxelLayout layout = make_strip_layout(23);
  SimConfig cfg = with_noise_preset(SimConfig{}, "paper");
  cfg.seed = 42;
  cfg.vent_tail_s = 60.0;  // long vent so the falling branch sweeps the count range

  const SkinMesh mesh = build_mesh(layout);
  Simulator sim(cfg, mesh.taxel_count(), mesh.cut);
  SimSource source(sim, cfg.ramp_rate, cfg.max_pressure, cfg.baseline_hold_s);
  AcquisitionParams ap;
  ap.max_pressure = cfg.max_pressure;
  ap.sample_rate = cfg.sample_rate;
  ap.vent_tail_s = cfg.vent_tail_s;
  ap.timeout_s = 600.0;
  const CalibrationLog log = run_calibration(ap, source);

  const auto increasing = select_increasing_segment(log);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < log.samples.size(); ++i) {
    if (log.samples[i].pressure_kpa > log.samples[argmax].pressure_kpa) argmax = i;
  }
  const std::vector<CalibrationSample> decreasing(log.samples.begin() + argmax + 1,
                                                  log.samples.end());
  REQUIRE(decreasing.size() > 100);

  CalibrationOptions opt;
  opt.wrap_threshold_kpa = cfg.wrap_threshold_kpa;
  const CalibrationResult inc_fit = calibrate_taxels(increasing, opt, mesh.geometry_hash);
  const CalibrationResult dec_fit = calibrate_taxels(decreasing, opt, mesh.geometry_hash);
  REQUIRE(inc_fit.failures.empty());
  REQUIRE(dec_fit.failures.empty());

  const auto trials = cli::default_trials(mesh);
  SimConfig vcfg = cfg;
  vcfg.session = 1;
  Simulator contact_inc(vcfg, mesh.taxel_count(), mesh.cut);
  const double err_inc =
      cli::run_validation(mesh, inc_fit.map, contact_inc, trials, std::nullopt)
          .mean_relative_error;
  Simulator contact_dec(vcfg, mesh.taxel_count(), mesh.cut);
  const double err_dec =
      cli::run_validation(mesh, dec_fit.map, contact_dec, trials, std::nullopt)
          .mean_relative_error;

  const bool ok = err_dec > err_inc;
  verdict(ok, "7. hysteresis: decreasing-segment error %.4f > increasing %.4f", err_dec, err_inc);
  CHECK(err_dec > err_inc);
}

TEST_CASE("8. determinism: identical config and seed give byte-identical outputs") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  TempDir dir;
  io::save_layout(dir.path / "layout.json", make_strip_layout(23));
  for (const char* out : {"a", "b"}) {
    nlohmann::ordered_json run;
    run["version"] = 1;
    run["layout"] = (dir.path / "layout.json").string();
    run["out_dir"] = (dir.path / out).string();
    run["seed"] = 4242;
    run["noise"] = "paper";
    std::ofstream(dir.path / (std::string(out) + ".json")) << run.dump(2);
    REQUIRE(cli::run_cli({"calibrate", "--config",
                          (dir.path / (std::string(out) + ".json")).string()}) == 0);
    REQUIRE(cli::run_cli({"validate", "--config",
                          (dir.path / (std::string(out) + ".json")).string()}) == 0);
  }
  bool ok = true;
  for (const char* f : {"log.csv", "calibration.json", "validation_summary.json",
                        "trace_trial_00.csv", "trace_trial_09.csv"}) {
    const bool same = slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f);
    if (!same) ok = false;
    CHECK(same);
  }
  verdict(ok, "8. determinism: repeated runs produce byte-identical logs, maps, and traces");
}
