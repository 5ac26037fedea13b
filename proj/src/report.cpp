// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "skincal/errors.hpp"

namespace skincal::report {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    std::span<const Series> series) {
  constexpr double W = 800, H = 500, ML = 70, MR = 20, MT = 40, MB = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
  }
  if (!(xmin < xmax)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymin < ymax)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  auto sx = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto sy = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  svg += "<line x1=\"" + num(ML) + "\" y1=\"" + num(H - MB) + "\" x2=\"" + num(W - MR) +
         "\" y2=\"" + num(H - MB) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(ML) + "\" y1=\"" + num(MT) + "\" x2=\"" + num(ML) + "\" y2=\"" +
         num(H - MB) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(H / 2) + "\" text-anchor=\"middle\" font-size=\"13\" " +
         "transform=\"rotate(-90 18 " + num(H / 2) + ")\">" + y_label + "</text>\n";
  for (double f : {0.0, 0.5, 1.0}) {
    svg += "<text x=\"" + num(ML + f * (W - ML - MR)) + "\" y=\"" + num(H - MB + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + num(xmin + f * (xmax - xmin)) +
           "</text>\n";
    svg += "<text x=\"" + num(ML - 8) + "\" y=\"" + num(H - MB - f * (H - MT - MB) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + num(ymin + f * (ymax - ymin)) +
           "</text>\n";
  }
  int legend_y = static_cast<int>(MT) + 8;
  for (const auto& s : series) {
    if (s.markers_only) {
      for (const auto& p : s.points) {
        svg += "<circle cx=\"" + num(sx(p[0])) + "\" cy=\"" + num(sy(p[1])) +
               "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
      }
    } else if (!s.points.empty()) {
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.points) svg += num(sx(p[0])) + "," + num(sy(p[1])) + " ";
      svg += "\"/>\n";
    }
    svg += "<text x=\"" + num(W - MR - 8) + "\" y=\"" + std::to_string(legend_y) +
           "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + s.color + "\">" + s.label +
           "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  write_text(path, svg);
}

void write_response_curve(const std::filesystem::path& stem, const CalibrationLog& log) {
  const auto segment = select_increasing_segment(log);
  Series curve{"average raw counts", {}, "#1f77b4", false};
  std::string csv = "pressure_kpa,avg_raw\n";
  for (const auto& s : segment) {
    double sum = 0.0;
    for (int r : s.raw) sum += r;
    const double avg = sum / static_cast<double>(s.raw.size());
    curve.points.push_back({s.pressure_kpa, avg});
    csv += num(s.pressure_kpa) + "," + num(avg) + "\n";
  }
  write_text(stem.string() + ".csv", csv);
  write_svg_plot(stem.string() + ".svg", "Average taxel response during calibration",
                 "pressure [kPa]", "raw counts", std::array{curve});
}

void write_taxel_fit(const std::filesystem::path& stem, const CalibrationLog& log,
                     const CalibrationMap& map, std::size_t taxel, double wrap_threshold_kpa) {
  if (taxel >= map.taxels.size()) throw Error("taxel index out of range");
  const auto segment = select_increasing_segment(log);
  const auto series = taxel_series(segment, taxel, wrap_threshold_kpa);
  const TaxelCalibration& cal = map.taxels[taxel];

  Series data{"samples", {}, "#d62728", true};
  Series fit{"quintic fit", {}, "#1f77b4", false};
  std::string csv = "raw,pressure_kpa,kind\n";
  for (const auto& s : series) {
    data.points.push_back({s.raw, s.pressure_kpa});
    csv += num(s.raw) + "," + num(s.pressure_kpa) + ",data\n";
  }
  for (int c = cal.raw_min; c <= cal.raw_max; ++c) {
    const double p = estimate_pressure(cal, c, map.max_calibrated_pressure).kpa;
    fit.points.push_back({static_cast<double>(c), p});
    csv += std::to_string(c) + "," + num(p) + ",fit\n";
  }
  write_text(stem.string() + ".csv", csv);
  write_svg_plot(stem.string() + ".svg", "Taxel " + std::to_string(taxel) + " pressure model",
                 "raw counts", "pressure [kPa]", std::array{fit, data});
}

void write_force_compare(const std::filesystem::path& stem,
                         std::span<const ForceComparePoint> points) {
  Series est{"estimated", {}, "#1f77b4", false};
  Series truth{"applied", {}, "#d62728", false};
  std::string csv = "t_s,estimated_N,truth_N\n";
  for (const auto& p : points) {
    est.points.push_back({p.t_s, p.estimated_n});
    truth.points.push_back({p.t_s, p.truth_n});
    csv += num(p.t_s) + "," + num(p.estimated_n) + "," + num(p.truth_n) + "\n";
  }
  write_text(stem.string() + ".csv", csv);
  write_svg_plot(stem.string() + ".svg", "Estimated vs applied force", "time [s]", "force [N]",
                 std::array{est, truth});
}

}  // namespace skincal::report
