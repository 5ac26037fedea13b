// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/force.hpp"

#include <cmath>

#include "skincal/errors.hpp"
#include "skincal/kernels.hpp"

namespace skincal {

namespace {

constexpr double kKpaM2ToNewton = 1000.0;
constexpr double kCentroidForceFloorN = 1e-9;

}  // namespace

FrameEvaluator::FrameEvaluator(const CalibrationMap& map, const SkinMesh& mesh)
    : mesh_(&mesh), max_pressure_(map.max_calibrated_pressure) {
  if (map.geometry_hash != mesh.geometry_hash) {
    throw GeometryMismatch("calibration geometry hash " + map.geometry_hash +
                           " does not match mesh " + mesh.geometry_hash);
  }
  if (map.taxels.size() != mesh.taxel_count()) {
    throw GeometryMismatch("calibration taxel count does not match mesh");
  }
  const std::size_t n = map.taxels.size();
  for (auto& c : coeff_) c.resize(n);
  center_.resize(n);
  inv_half_.resize(n);
  raw_lo_.resize(n);
  raw_hi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TaxelCalibration& cal = map.taxels[i];
    for (int k = 0; k < 6; ++k) coeff_[k][i] = cal.coeffs[k];
    center_[i] = cal.center;
    inv_half_[i] = 1.0 / cal.halfrange;
    raw_lo_[i] = static_cast<double>(cal.raw_min);
    raw_hi_[i] = static_cast<double>(cal.raw_max);
  }
}

std::vector<double> FrameEvaluator::estimate_frame(std::span<const int> raw,
                                                   bool* any_extrapolated) const {
  const std::size_t n = center_.size();
  if (raw.size() != n) throw GeometryMismatch("frame length does not match calibration");
  std::vector<double> raw_d(n);
  for (std::size_t i = 0; i < n; ++i) raw_d[i] = static_cast<double>(raw[i]);
  if (any_extrapolated) {
    bool ex = false;
    for (std::size_t i = 0; i < n; ++i) {
      ex = ex || raw_d[i] < raw_lo_[i] || raw_d[i] > raw_hi_[i];
    }
    *any_extrapolated = ex;
  }
  const double* cptr[6] = {coeff_[0].data(), coeff_[1].data(), coeff_[2].data(),
                           coeff_[3].data(), coeff_[4].data(), coeff_[5].data()};
  std::vector<double> out(n);
  kernels::table().poly5_frame(raw_d.data(), n, cptr, center_.data(), inv_half_.data(),
                               raw_lo_.data(), raw_hi_.data(), 0.0, max_pressure_, out.data());
  return out;
}

PressureField FrameEvaluator::reconstruct(std::span<const int> raw,
                                          const TareBaseline& tare) const {
  PressureField field;
  field.mesh = mesh_;
  std::vector<double> est = estimate_frame(raw, &field.any_extrapolated);
  field.taxel_kpa.resize(est.size());
  kernels::table().tare_subtract(est.data(), tare.pressure_kpa.data(), est.size(),
                                 field.taxel_kpa.data());
  return field;
}

TareBaseline capture_tare(const FrameEvaluator& eval,
                          std::span<const std::vector<int>> zero_load_frames) {
  if (zero_load_frames.empty()) throw Error("tare capture needs at least one frame");
  const std::size_t n = zero_load_frames[0].size();
  std::vector<double> mean_raw(n, 0.0);
  for (const auto& frame : zero_load_frames) {
    for (std::size_t i = 0; i < n; ++i) mean_raw[i] += static_cast<double>(frame[i]);
  }
  std::vector<int> rounded(n);
  TareBaseline tare;
  tare.pressure_kpa.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mean_raw[i] / static_cast<double>(zero_load_frames.size());
    rounded[i] = static_cast<int>(std::lround(m));
  }
  tare.pressure_kpa = eval.estimate_frame(rounded, nullptr);
  return tare;
}

PressureField reconstruct_field(const SkinMesh& mesh, const CalibrationMap& map,
                                std::span<const int> raw_frame, const TareBaseline& tare) {
  return FrameEvaluator(map, mesh).reconstruct(raw_frame, tare);
}

ForceEstimate integrate_force(const PressureField& field) {
  const SkinMesh& mesh = *field.mesh;
  const std::size_t nf = mesh.facets.size();

  std::vector<double> p0(nf), p1(nf), p2(nf), weight(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& facet = mesh.facets[f];
    p0[f] = field.taxel_kpa[facet[0]];
    p1[f] = field.taxel_kpa[facet[1]];
    p2[f] = field.taxel_kpa[facet[2]];
  }
  kernels::table().facet_force(p0.data(), p1.data(), p2.data(), mesh.facet_areas.data(), nf,
                               weight.data());

  std::vector<double> fx(nf), fy(nf), fz(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    fx[f] = weight[f] * mesh.normals[f].x();
    fy[f] = weight[f] * mesh.normals[f].y();
    fz[f] = weight[f] * mesh.normals[f].z();
  }

  ForceEstimate est;
  est.any_extrapolated = field.any_extrapolated;
  est.force_n = kKpaM2ToNewton * Eigen::Vector3d(kernels::pairwise_sum(fx.data(), nf),
                                                 kernels::pairwise_sum(fy.data(), nf),
                                                 kernels::pairwise_sum(fz.data(), nf));
  est.magnitude_n = est.force_n.norm();

  if (est.magnitude_n >= kCentroidForceFloorN) {
    // pressure-weighted mean of the edge-midpoint quadrature points
    std::vector<double> qw(3 * nf), qwu(3 * nf), qwv(3 * nf);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& facet = mesh.facets[f];
      const Eigen::Vector2d& a = mesh.taxel_positions[facet[0]];
      const Eigen::Vector2d& b = mesh.taxel_positions[facet[1]];
      const Eigen::Vector2d& c = mesh.taxel_positions[facet[2]];
      const double third_area = mesh.facet_areas[f] / 3.0;
      const Eigen::Vector2d mids[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
      const double pmids[3] = {0.5 * (p0[f] + p1[f]), 0.5 * (p1[f] + p2[f]),
                               0.5 * (p2[f] + p0[f])};
      for (int q = 0; q < 3; ++q) {
        const double w = third_area * pmids[q];
        qw[3 * f + q] = w;
        qwu[3 * f + q] = w * mids[q].x();
        qwv[3 * f + q] = w * mids[q].y();
      }
    }
    const double wsum = kernels::pairwise_sum(qw.data(), qw.size());
    if (wsum > 0.0) {
      est.contact_centroid = Eigen::Vector2d(kernels::pairwise_sum(qwu.data(), qwu.size()) / wsum,
                                             kernels::pairwise_sum(qwv.data(), qwv.size()) / wsum);
      est.centroid_defined = true;
    }
  }
  return est;
}

double relative_error(double estimated_n, double truth_n) {
  if (!(truth_n > 0.0)) throw ZeroTruth("truth force must be positive");
  return std::abs(estimated_n - truth_n) / truth_n;
}

}  // namespace skincal
