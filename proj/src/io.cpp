// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "skincal/errors.hpp"

namespace skincal::io {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

ordered_json parse_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.empty()) throw ParseError("empty file " + path.string(), 1);
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), line_of_byte(text, e.byte));
  }
}

void require_version(const ordered_json& j, const std::filesystem::path& path) {
  if (!j.contains("version") || j["version"] != 1) {
    throw ParseError("unsupported or missing version in " + path.string(), 1);
  }
}

std::array<double, 2> range_field(const ordered_json& j, const char* key,
                                  std::array<double, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  return {v.at(0).get<double>(), v.at(1).get<double>()};
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

TaxelLayout load_layout(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  require_version(j, path);
  TaxelLayout layout;
  try {
    layout.units_per_side = j.at("units_per_side").get<double>();
    for (const auto& t : j.at("triangles")) {
      TriangleModule mod;
      mod.module_id = t.at("id").get<int>();
      mod.origin = Eigen::Vector2d(t.at("origin").at(0).get<double>(),
                                   t.at("origin").at(1).get<double>());
      mod.orientation = t.at("orientation").get<double>();
      const auto& mask = t.at("cut_mask");
      if (mask.size() != 10) throw ParseError("cut_mask must have 10 entries", 1);
      for (int i = 0; i < 10; ++i) mod.cut_mask[i] = mask.at(i).get<bool>();
      layout.triangles.push_back(mod);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 1);
  }
  return layout;
}

void save_layout(const std::filesystem::path& path, const TaxelLayout& layout) {
  ordered_json j;
  j["version"] = 1;
  j["units_per_side"] = layout.units_per_side;
  j["triangles"] = ordered_json::array();
  for (const auto& mod : layout.triangles) {
    ordered_json t;
    t["id"] = mod.module_id;
    t["origin"] = {mod.origin.x(), mod.origin.y()};
    t["orientation"] = mod.orientation;
    t["cut_mask"] = mod.cut_mask;
    j["triangles"].push_back(t);
  }
  write_file(path, j.dump(2) + "\n");
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  require_version(j, path);
  SimConfig cfg;
  try {
    cfg.ramp_rate = j.value("ramp_rate", cfg.ramp_rate);
    cfg.max_pressure = j.value("max_pressure", cfg.max_pressure);
    cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
    cfg.regulator_tau = j.value("regulator_tau", cfg.regulator_tau);
    cfg.wrap_threshold_kpa = j.value("wrap_threshold_kpa", cfg.wrap_threshold_kpa);
    cfg.pressure_noise_sigma = j.value("pressure_noise_sigma", cfg.pressure_noise_sigma);
    cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
    cfg.hysteresis_tau_down = j.value("hysteresis_tau_down", cfg.hysteresis_tau_down);
    cfg.saturation_knee_kpa = j.value("saturation_knee_kpa", cfg.saturation_knee_kpa);
    cfg.baseline_hold_s = j.value("baseline_hold_s", cfg.baseline_hold_s);
    cfg.vent_tail_s = j.value("vent_tail_s", cfg.vent_tail_s);
    cfg.attain_margin_kpa = j.value("attain_margin_kpa", cfg.attain_margin_kpa);
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("taxel_params")) {
      const auto& tp = j.at("taxel_params");
      if (tp.contains("randomize")) {
        const auto& r = tp.at("randomize");
        cfg.ranges.r0 = range_field(r, "r0", cfg.ranges.r0);
        cfg.ranges.sensitivity = range_field(r, "sensitivity", cfg.ranges.sensitivity);
        cfg.ranges.tau_p = range_field(r, "tau_p", cfg.ranges.tau_p);
        cfg.ranges.cut_sensitivity = range_field(r, "cut_sensitivity", cfg.ranges.cut_sensitivity);
      }
      if (tp.contains("explicit")) {
        std::vector<TaxelResponseModel> models;
        for (const auto& m : tp.at("explicit")) {
          TaxelResponseModel model;
          model.r0 = m.at("r0").get<double>();
          model.sensitivity = m.at("sensitivity").get<double>();
          model.tau_p = m.at("tau_p").get<double>();
          model.is_cut = m.value("is_cut", false);
          model.hysteresis_tau_down = m.value("hysteresis_tau_down", cfg.hysteresis_tau_down);
          model.noise_sigma = m.value("noise_sigma", cfg.noise_sigma);
          model.saturation_knee_kpa = m.value("saturation_knee_kpa", cfg.saturation_knee_kpa);
          models.push_back(model);
        }
        cfg.explicit_models = std::move(models);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 1);
  }
  return cfg;
}

nlohmann::ordered_json sim_config_json(const SimConfig& cfg) {
  ordered_json j;
  j["version"] = 1;
  j["ramp_rate"] = cfg.ramp_rate;
  j["max_pressure"] = cfg.max_pressure;
  j["sample_rate"] = cfg.sample_rate;
  j["regulator_tau"] = cfg.regulator_tau;
  j["wrap_threshold_kpa"] = cfg.wrap_threshold_kpa;
  j["pressure_noise_sigma"] = cfg.pressure_noise_sigma;
  j["noise_sigma"] = cfg.noise_sigma;
  j["hysteresis_tau_down"] = cfg.hysteresis_tau_down;
  j["saturation_knee_kpa"] = cfg.saturation_knee_kpa;
  j["baseline_hold_s"] = cfg.baseline_hold_s;
  j["vent_tail_s"] = cfg.vent_tail_s;
  j["attain_margin_kpa"] = cfg.attain_margin_kpa;
  j["timeout_s"] = cfg.timeout_s;
  j["seed"] = cfg.seed;
  ordered_json tp;
  if (cfg.explicit_models) {
    tp["explicit"] = ordered_json::array();
    for (const auto& m : *cfg.explicit_models) {
      tp["explicit"].push_back({{"r0", m.r0},
                                {"sensitivity", m.sensitivity},
                                {"tau_p", m.tau_p},
                                {"is_cut", m.is_cut},
                                {"hysteresis_tau_down", m.hysteresis_tau_down},
                                {"noise_sigma", m.noise_sigma},
                                {"saturation_knee_kpa", m.saturation_knee_kpa}});
    }
  } else {
    tp["randomize"] = {{"r0", cfg.ranges.r0},
                       {"sensitivity", cfg.ranges.sensitivity},
                       {"tau_p", cfg.ranges.tau_p},
                       {"cut_sensitivity", cfg.ranges.cut_sensitivity}};
  }
  j["taxel_params"] = tp;
  return j;
}

void save_sim_config(const std::filesystem::path& path, const SimConfig& cfg) {
  write_file(path, sim_config_json(cfg).dump(2) + "\n");
}

CalibrationMap load_calibration(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  require_version(j, path);
  CalibrationMap map;
  try {
    map.max_calibrated_pressure = j.at("max_calibrated_pressure").get<double>();
    map.geometry_hash = j.at("geometry_hash").get<std::string>();
    const auto& taxels = j.at("taxels");
    map.taxels.resize(taxels.size());
    for (const auto& t : taxels) {
      const auto id = t.at("id").get<std::size_t>();
      if (id >= map.taxels.size()) {
        throw ParseError("taxel ids must be contiguous from 0 in " + path.string(), 1);
      }
      TaxelCalibration cal;
      const auto& coeffs = t.at("coeffs");
      if (coeffs.size() != 6) throw ParseError("coeffs must have 6 entries", 1);
      for (int k = 0; k < 6; ++k) cal.coeffs[k] = coeffs.at(k).get<double>();
      cal.center = t.at("center").get<double>();
      cal.halfrange = t.at("halfrange").get<double>();
      cal.raw_min = t.at("raw_min").get<int>();
      cal.raw_max = t.at("raw_max").get<int>();
      cal.fit_rmse = t.at("rmse_kpa").get<double>();
      cal.saturated = t.at("saturated").get<bool>();
      map.taxels[id] = cal;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 1);
  }
  return map;
}

void save_calibration(const std::filesystem::path& path, const CalibrationMap& map) {
  ordered_json j;
  j["version"] = 1;
  j["max_calibrated_pressure"] = map.max_calibrated_pressure;
  j["geometry_hash"] = map.geometry_hash;
  j["taxels"] = ordered_json::array();
  for (std::size_t i = 0; i < map.taxels.size(); ++i) {
    const TaxelCalibration& cal = map.taxels[i];
    j["taxels"].push_back({{"id", i},
                           {"coeffs", cal.coeffs},
                           {"center", cal.center},
                           {"halfrange", cal.halfrange},
                           {"raw_min", cal.raw_min},
                           {"raw_max", cal.raw_max},
                           {"rmse_kpa", cal.fit_rmse},
                           {"saturated", cal.saturated}});
  }
  write_file(path, j.dump(2) + "\n");
}

void write_log_csv(const std::filesystem::path& path, const CalibrationLog& log) {
  std::string out;
  const std::size_t n = log.samples.empty() ? 0 : log.samples[0].raw.size();
  out += "t_s,pressure_kpa";
  for (std::size_t i = 0; i < n; ++i) out += ",taxel_" + std::to_string(i);
  out += '\n';
  for (const auto& s : log.samples) {
    out += format_double(s.t_s, "%.6f");
    out += ',';
    out += format_double(s.pressure_kpa, "%.10g");
    for (int r : s.raw) {
      out += ',';
      out += std::to_string(r);
    }
    out += '\n';
  }
  write_file(path, out);
}

CalibrationLog read_log_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.empty()) throw ParseError("empty file " + path.string(), 1);

  CalibrationLog log;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty file " + path.string(), 1);
  ++line_no;
  if (line.rfind("t_s,pressure_kpa", 0) != 0) {
    throw ParseError("bad header in " + path.string(), line_no);
  }
  std::size_t n_taxels = 0;
  for (char ch : line) {
    if (ch == ',') ++n_taxels;
  }
  if (n_taxels < 1) throw ParseError("bad header in " + path.string(), line_no);
  n_taxels -= 1;

  double prev_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    CalibrationSample s;
    s.raw.reserve(n_taxels);
    std::size_t pos = 0, field = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string tok =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        if (field == 0) {
          s.t_s = std::stod(tok);
        } else if (field == 1) {
          s.pressure_kpa = std::stod(tok);
        } else {
          const int v = std::stoi(tok);
          if (v < 0 || v > 255) throw std::out_of_range("raw count outside 0..255");
          s.raw.push_back(v);
        }
      } catch (const std::exception&) {
        throw ParseError("bad field '" + tok + "' in " + path.string(), line_no);
      }
      ++field;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (s.raw.size() != n_taxels) {
      throw ParseError("expected " + std::to_string(n_taxels + 2) + " fields in " + path.string(),
                       line_no);
    }
    if (!(s.t_s > prev_t)) {
      throw ParseError("timestamps must be strictly increasing in " + path.string(), line_no);
    }
    prev_t = s.t_s;
    log.samples.push_back(std::move(s));
  }
  if (log.samples.size() >= 2) {
    log.sample_rate = 1.0 / (log.samples[1].t_s - log.samples[0].t_s);
  }
  return log;
}

void write_force_trace_csv(const std::filesystem::path& path,
                           std::span<const ForceTraceRow> rows) {
  std::string out = "t_s,fx_N,fy_N,fz_N,magnitude_N,extrapolated\n";
  for (const auto& r : rows) {
    out += format_double(r.t_s, "%.6f");
    out += ',' + format_double(r.fx_n, "%.10g");
    out += ',' + format_double(r.fy_n, "%.10g");
    out += ',' + format_double(r.fz_n, "%.10g");
    out += ',' + format_double(r.magnitude_n, "%.10g");
    out += ',';
    out += r.extrapolated ? '1' : '0';
    out += '\n';
  }
  write_file(path, out);
}

std::vector<ForceTraceRow> read_force_trace_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.empty()) throw ParseError("empty file " + path.string(), 1);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file " + path.string(), 1);
  ++line_no;
  if (line.rfind("t_s,fx_N", 0) != 0) throw ParseError("bad header in " + path.string(), line_no);
  std::vector<ForceTraceRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ForceTraceRow r;
    double ext = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &r.t_s, &r.fx_n, &r.fy_n, &r.fz_n,
                    &r.magnitude_n, &ext) != 6) {
      throw ParseError("bad row in " + path.string(), line_no);
    }
    r.extrapolated = ext != 0.0;
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrialSpec> load_trials(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  require_version(j, path);
  std::vector<TrialSpec> trials;
  try {
    for (const auto& t : j.at("trials")) {
      TrialSpec spec;
      spec.mass_kg = t.at("mass_kg").get<double>();
      spec.center = {t.at("center").at(0).get<double>(), t.at("center").at(1).get<double>()};
      spec.radius_m = t.at("radius").get<double>();
      spec.duration_s = t.value("duration_s", spec.duration_s);
      trials.push_back(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 1);
  }
  return trials;
}

void save_trials(const std::filesystem::path& path, std::span<const TrialSpec> trials) {
  ordered_json j;
  j["version"] = 1;
  j["trials"] = ordered_json::array();
  for (const auto& t : trials) {
    j["trials"].push_back({{"mass_kg", t.mass_kg},
                           {"center", t.center},
                           {"radius", t.radius_m},
                           {"duration_s", t.duration_s}});
  }
  write_file(path, j.dump(2) + "\n");
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  require_version(j, path);
  RunConfig cfg;
  try {
    cfg.layout = j.value("layout", cfg.layout);
    cfg.sim_config = j.value("sim_config", cfg.sim_config);
    cfg.trials = j.value("trials", cfg.trials);
    if (j.contains("ramp_rate")) cfg.ramp_rate = j["ramp_rate"].get<double>();
    if (j.contains("max_pressure")) cfg.max_pressure = j["max_pressure"].get<double>();
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.noise = j.value("noise", cfg.noise);
    cfg.filter = j.value("filter", cfg.filter);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 1);
  }
  return cfg;
}

std::string timestamp_utc() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace skincal::io
