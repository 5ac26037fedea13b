// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "skincal/calib.hpp"
#include "skincal/errors.hpp"
#include "skincal/geometry.hpp"
#include "skincal/kernels.hpp"
#include "skincal/report.hpp"
#include "skincal/sim_source.hpp"

namespace skincal::cli {

namespace {

constexpr double kStandardGravity = 9.81;
constexpr double kTargetTrialKpa = 140.0;
constexpr int kTareFrames = 10;

std::optional<double> parse_filter(const std::string& spec) {
  if (spec == "off") return std::nullopt;
  if (spec.rfind("ema:", 0) == 0) {
    const double alpha = std::stod(spec.substr(4));
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("EMA alpha must be in (0, 1]");
    return alpha;
  }
  if (spec == "ema") return 0.2;
  throw Error("unknown filter spec: " + spec);
}

AcquisitionParams acquisition_params(const SimConfig& sim, double ramp_rate) {
  AcquisitionParams ap;
  ap.max_pressure = sim.max_pressure;
  ap.sample_rate = sim.sample_rate;
  ap.attain_margin_kpa = sim.attain_margin_kpa;
  ap.vent_tail_s = sim.vent_tail_s;
  ap.baseline_samples =
      std::max(1, static_cast<int>(std::lround(sim.baseline_hold_s * sim.sample_rate)));
  ap.timeout_s = sim.timeout_s > 0.0
                     ? sim.timeout_s
                     : sim.baseline_hold_s +
                           (ramp_rate > 0.0 ? sim.max_pressure / ramp_rate : 0.0) + 60.0;
  return ap;
}

CalibrationLog acquire_log(ResolvedRun& rr) {
  Simulator sim(rr.sim, rr.mesh.taxel_count(), rr.mesh.cut);
  SimSource source(sim, rr.ramp_rate, rr.sim.max_pressure, rr.sim.baseline_hold_s);
  CalibrationLog log = run_calibration(acquisition_params(rr.sim, rr.ramp_rate), source);
  log.config_snapshot = io::sim_config_json(rr.sim);
  return log;
}

}  // namespace

ResolvedRun resolve_run(const Overrides& overrides) {
  ResolvedRun rr;
  if (overrides.config) rr.run = io::load_run_config(*overrides.config);

  if (rr.run.layout == "builtin:forearm23") {
    rr.layout = make_strip_layout(23);
  } else {
    rr.layout = io::load_layout(rr.run.layout);
  }
  rr.mesh = build_mesh(rr.layout);

  if (rr.run.sim_config == "builtin:default") {
    rr.sim = SimConfig{};
  } else {
    rr.sim = io::load_sim_config(rr.run.sim_config);
  }
  if (rr.run.ramp_rate) rr.sim.ramp_rate = *rr.run.ramp_rate;
  if (rr.run.max_pressure) rr.sim.max_pressure = *rr.run.max_pressure;
  if (rr.run.seed) rr.sim.seed = *rr.run.seed;
  if (overrides.seed) rr.sim.seed = *overrides.seed;
  rr.ramp_rate = rr.sim.ramp_rate;

  const std::string noise = overrides.noise.value_or(rr.run.noise);
  rr.sim = with_noise_preset(rr.sim, noise);

  rr.ema_alpha = parse_filter(overrides.filter.value_or(rr.run.filter));

  if (rr.run.trials == "builtin:default") {
    rr.trials = default_trials(rr.mesh);
  } else {
    rr.trials = io::load_trials(rr.run.trials);
  }

  rr.out_dir = overrides.out_dir.value_or(rr.run.out_dir);
  std::filesystem::create_directories(rr.out_dir);
  return rr;
}

std::vector<io::TrialSpec> default_trials(const SkinMesh& mesh) {
  const std::size_t n = mesh.taxel_count();
  std::vector<double> lumped = mesh.lumped_areas;
  std::nth_element(lumped.begin(), lumped.begin() + lumped.size() / 2, lumped.end());
  const double median_lumped = lumped[lumped.size() / 2];

  // anchors: taxels closest to the patch center first
  Eigen::Vector2d lo = mesh.taxel_positions[0], hi = mesh.taxel_positions[0];
  for (const auto& p : mesh.taxel_positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  // anchors: central taxels whose hat area is not a triangulation sliver
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.lumped_areas[i] >= median_lumped) anchors.push_back(i);
  }
  if (anchors.empty()) {
    anchors.resize(n);
    for (std::size_t i = 0; i < n; ++i) anchors[i] = i;
  }
  std::sort(anchors.begin(), anchors.end(), [&](std::size_t a, std::size_t b) {
    const double da = (mesh.taxel_positions[a] - mid).squaredNorm();
    const double db = (mesh.taxel_positions[b] - mid).squaredNorm();
    if (da != db) return da < db;
    return a < b;
  });

  std::vector<io::TrialSpec> trials;
  for (int k = 0; k < 10; ++k) {
    const double mass = 0.2 * (k + 1);
    const auto want = static_cast<std::size_t>(std::clamp<long>(
        std::lround(mass * kStandardGravity / (kTargetTrialKpa * 1000.0 * median_lumped)), 1,
        static_cast<long>(n)));
    const Eigen::Vector2d center =
        mesh.taxel_positions[anchors[static_cast<std::size_t>(k) %
                                     std::min<std::size_t>(anchors.size(), 16)]];
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = (mesh.taxel_positions[i] - center).norm();
    std::sort(dist.begin(), dist.end());
    const double radius =
        want < n ? 0.5 * (dist[want - 1] + dist[want]) : dist[n - 1] + 1e-6;

    io::TrialSpec spec;
    spec.mass_kg = mass;
    spec.center = {center.x(), center.y()};
    spec.radius_m = radius;
    spec.duration_s = 5.0;
    trials.push_back(spec);
  }
  return trials;
}

ValidationOutcome run_validation(const SkinMesh& mesh, const CalibrationMap& map, Simulator& sim,
                                 std::span<const io::TrialSpec> trials,
                                 std::optional<double> ema_alpha) {
  const FrameEvaluator eval(map, mesh);
  const std::size_t n = mesh.taxel_count();

  sim.reset_fabric();
  std::vector<std::vector<int>> zero_frames;
  const std::vector<double> zeros(n, 0.0);
  for (int i = 0; i < kTareFrames; ++i) zero_frames.push_back(sim.step_contact(zeros).raw);
  const TareBaseline tare = capture_tare(eval, zero_frames);

  ValidationOutcome outcome;
  double err_sum = 0.0;
  for (const auto& trial : trials) {
    if (!(trial.mass_kg > 0.0)) throw ZeroTruth("trial mass must be positive");
    TrialResult result;
    result.spec = trial;
    result.truth_n = trial.mass_kg * kStandardGravity;

    const Eigen::Vector2d center(trial.center[0], trial.center[1]);
    std::vector<std::size_t> covered;
    double area_eff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mesh.taxel_positions[i] - center).norm() <= trial.radius_m) {
        covered.push_back(i);
        area_eff += mesh.lumped_areas[i];
      }
    }
    if (covered.empty() || !(area_eff > 0.0)) {
      throw Error("trial footprint covers no taxels");
    }
    result.covered_taxels = covered.size();
    result.applied_kpa = result.truth_n / area_eff / 1000.0;

    std::vector<double> applied(n, 0.0);
    for (std::size_t i : covered) applied[i] = result.applied_kpa;

    sim.reset_fabric();
    EmaFilter filter(ema_alpha.value_or(0.0));
    const int frames =
        std::max(1, static_cast<int>(std::lround(trial.duration_s * sim.config().sample_rate)));
    double mag_sum = 0.0;
    for (int f = 0; f < frames; ++f) {
      const Simulator::Tick tick = sim.step_contact(applied);
      PressureField field = eval.reconstruct(tick.raw, tare);
      if (ema_alpha) filter.apply(field.taxel_kpa);
      const ForceEstimate fe = integrate_force(field);
      mag_sum += fe.magnitude_n;
      result.trace.push_back({tick.t_s, fe.force_n.x(), fe.force_n.y(), fe.force_n.z(),
                              fe.magnitude_n, fe.any_extrapolated});
    }
    result.mean_estimate_n = mag_sum / frames;
    result.relative_error = relative_error(result.mean_estimate_n, result.truth_n);
    err_sum += result.relative_error;
    outcome.trials.push_back(std::move(result));
  }
  outcome.mean_relative_error = err_sum / static_cast<double>(outcome.trials.size());
  return outcome;
}

int cmd_simulate(const Overrides& overrides, bool emit_configs) {
  ResolvedRun rr = resolve_run(overrides);
  const CalibrationLog log = acquire_log(rr);
  io::write_log_csv(rr.out_dir / "log.csv", log);
  if (emit_configs) {
    io::save_layout(rr.out_dir / "layout.json", rr.layout);
    io::save_sim_config(rr.out_dir / "sim_config.json", rr.sim);
    io::save_trials(rr.out_dir / "trials.json", rr.trials);
  }
  double peak = 0.0;
  for (const auto& s : log.samples) peak = std::max(peak, s.pressure_kpa);
  std::printf("simulated %zu samples, peak reported pressure %.2f kPa (kernels: %s)\n",
              log.samples.size(), peak,
              std::string(kernels::backend_name(kernels::active_backend())).c_str());
  std::printf("wrote %s\n", (rr.out_dir / "log.csv").string().c_str());
  return 0;
}

int cmd_calibrate(const Overrides& overrides) {
  ResolvedRun rr = resolve_run(overrides);
  const CalibrationLog log = acquire_log(rr);
  io::write_log_csv(rr.out_dir / "log.csv", log);

  const auto segment = select_increasing_segment(log);
  CalibrationOptions options;
  options.wrap_threshold_kpa = rr.sim.wrap_threshold_kpa;
  CalibrationResult result = calibrate_taxels(segment, options, rr.mesh.geometry_hash);

  if (!result.failures.empty()) {
    std::fprintf(stderr, "calibration failed for %zu taxel(s):\n", result.failures.size());
    for (const auto& f : result.failures) {
      std::fprintf(stderr, "  taxel %zu: %s\n", f.taxel, f.reason.c_str());
    }
    std::fprintf(stderr, "rerun with a longer or slower ramp to widen the count range\n");
    return 2;
  }

  result.map.created_at = io::timestamp_utc();
  io::save_calibration(rr.out_dir / "calibration.json", result.map);

  std::printf("taxel  rmse_kpa  saturated\n");
  double rmse_sum = 0.0, rmse_max = 0.0;
  std::size_t saturated = 0;
  for (std::size_t i = 0; i < result.map.taxels.size(); ++i) {
    const auto& t = result.map.taxels[i];
    std::printf("%5zu  %8.4f  %s\n", i, t.fit_rmse, t.saturated ? "yes" : "no");
    rmse_sum += t.fit_rmse;
    rmse_max = std::max(rmse_max, t.fit_rmse);
    saturated += t.saturated ? 1 : 0;
  }
  std::printf("fitted %zu taxels over %zu samples: rmse mean %.4f kPa, max %.4f kPa, "
              "%zu saturated\n",
              result.map.taxels.size(), segment.size(), rmse_sum / result.map.taxels.size(),
              rmse_max, saturated);
  std::printf("wrote %s and %s\n", (rr.out_dir / "log.csv").string().c_str(),
              (rr.out_dir / "calibration.json").string().c_str());
  return 0;
}

int cmd_validate(const Overrides& overrides, const std::optional<std::string>& calibration_path,
                 const std::optional<std::string>& trials_path) {
  ResolvedRun rr = resolve_run(overrides);
  const std::filesystem::path cal_path =
      calibration_path.value_or((rr.out_dir / "calibration.json").string());
  const CalibrationMap map = io::load_calibration(cal_path);
  if (trials_path) rr.trials = io::load_trials(*trials_path);

  SimConfig vcfg = rr.sim;
  vcfg.session = 1;  // same skin, fresh noise
  Simulator sim(vcfg, rr.mesh.taxel_count(), rr.mesh.cut);
  const ValidationOutcome outcome =
      run_validation(rr.mesh, map, sim, rr.trials, rr.ema_alpha);

  nlohmann::ordered_json summary;
  summary["version"] = 1;
  summary["mean_relative_error"] = outcome.mean_relative_error;
  summary["trials"] = nlohmann::ordered_json::array();
  std::printf("trial  mass_kg  covered  applied_kpa  truth_N  estimate_N  rel_error\n");
  for (std::size_t k = 0; k < outcome.trials.size(); ++k) {
    const TrialResult& tr = outcome.trials[k];
    char trace_name[32];
    std::snprintf(trace_name, sizeof(trace_name), "trace_trial_%02zu.csv", k);
    io::write_force_trace_csv(rr.out_dir / trace_name, tr.trace);
    summary["trials"].push_back({{"mass_kg", tr.spec.mass_kg},
                                 {"truth_n", tr.truth_n},
                                 {"mean_estimate_n", tr.mean_estimate_n},
                                 {"relative_error", tr.relative_error},
                                 {"applied_kpa", tr.applied_kpa},
                                 {"covered_taxels", tr.covered_taxels},
                                 {"duration_s", tr.spec.duration_s},
                                 {"trace", trace_name}});
    std::printf("%5zu  %7.2f  %7zu  %11.2f  %7.3f  %10.3f  %8.4f\n", k, tr.spec.mass_kg,
                tr.covered_taxels, tr.applied_kpa, tr.truth_n, tr.mean_estimate_n,
                tr.relative_error);
  }
  {
    std::ofstream out(rr.out_dir / "validation_summary.json", std::ios::binary);
    if (!out) throw IoError("cannot write validation_summary.json");
    out << summary.dump(2) << "\n";
  }
  std::printf("mean relative error over %zu trials: %.4f\n", outcome.trials.size(),
              outcome.mean_relative_error);
  return 0;
}

int cmd_report(const Overrides& overrides, const std::optional<std::string>& log_path,
               const std::optional<std::string>& calibration_path, int taxel,
               const std::optional<std::string>& summary_path) {
  if (!log_path && !summary_path) {
    throw Error("report needs --log and/or --summary inputs");
  }
  ResolvedRun rr = resolve_run(overrides);

  if (log_path) {
    const CalibrationLog log = io::read_log_csv(*log_path);
    report::write_response_curve(rr.out_dir / "response_curve", log);
    std::printf("wrote %s.{csv,svg}\n", (rr.out_dir / "response_curve").string().c_str());
    if (calibration_path) {
      const CalibrationMap map = io::load_calibration(*calibration_path);
      const std::string stem = "taxel_fit_" + std::to_string(taxel);
      report::write_taxel_fit(rr.out_dir / stem, log, map, static_cast<std::size_t>(taxel),
                              rr.sim.wrap_threshold_kpa);
      std::printf("wrote %s.{csv,svg}\n", (rr.out_dir / stem).string().c_str());
    }
  }

  if (summary_path) {
    const auto summary_file = std::filesystem::path(*summary_path);
    const std::string text = [&] {
      std::ifstream in(summary_file, std::ios::binary);
      if (!in) throw IoError("cannot open " + summary_file.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }();
    nlohmann::ordered_json summary;
    try {
      summary = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(summary_file.string() + ": " + e.what(), 1);
    }
    std::vector<report::ForceComparePoint> points;
    for (const auto& trial : summary.at("trials")) {
      const double truth = trial.at("truth_n").get<double>();
      const auto trace_path = summary_file.parent_path() / trial.at("trace").get<std::string>();
      for (const auto& row : io::read_force_trace_csv(trace_path)) {
        points.push_back({row.t_s, row.magnitude_n, truth});
      }
    }
    report::write_force_compare(rr.out_dir / "force_compare", points);
    std::printf("wrote %s.{csv,svg}\n", (rr.out_dir / "force_compare").string().c_str());
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"pneumatic tactile-skin calibration toolkit"};
  app.require_subcommand(1);

  Overrides overrides;
  bool emit_configs = false;
  std::optional<std::string> calibration_path, trials_path, log_path, summary_path;
  int taxel = 0;

  auto add_common = [&overrides](CLI::App* sub) {
    sub->add_option("--config", overrides.config, "run configuration JSON");
    sub->add_option("--seed", overrides.seed, "master RNG seed");
    sub->add_option("--out", overrides.out_dir, "output directory");
    sub->add_option("--noise", overrides.noise, "noise preset: paper|off");
    sub->add_option("--filter", overrides.filter, "estimate filter: off|ema:<alpha>");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a pressure ramp and write the log");
  add_common(simulate);
  simulate->add_flag("--emit-configs", emit_configs, "write resolved layout/sim/trial configs");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "ramp, fit every taxel, write the calibration map");
  add_common(calibrate);

  CLI::App* validate =
      app.add_subcommand("validate", "masses-on-skin protocol against a calibration");
  add_common(validate);
  validate->add_option("--calibration", calibration_path, "calibration JSON path");
  validate->add_option("--trials", trials_path, "trial spec JSON path");

  CLI::App* rep = app.add_subcommand("report", "emit plot artifacts from logs and traces");
  add_common(rep);
  rep->add_option("--log", log_path, "acquisition log CSV");
  rep->add_option("--calibration", calibration_path, "calibration JSON (taxel fit plot)");
  rep->add_option("--taxel", taxel, "taxel id for the fit plot");
  rep->add_option("--summary", summary_path, "validation summary JSON (force plot)");

  std::vector<const char*> argv;
  argv.push_back("skincal");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed()) return cmd_simulate(overrides, emit_configs);
    if (calibrate->parsed()) return cmd_calibrate(overrides);
    if (validate->parsed()) return cmd_validate(overrides, calibration_path, trials_path);
    if (rep->parsed()) return cmd_report(overrides, log_path, calibration_path, taxel,
                                         summary_path);
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace skincal::cli
