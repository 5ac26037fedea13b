// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "skincal/calib.hpp"
#include "skincal/geometry.hpp"

namespace skincal {

/// Piecewise-linear pressure field over a mesh: per-taxel values, interpolated
/// barycentrically inside facets.
struct PressureField {
  const SkinMesh* mesh = nullptr;
  std::vector<double> taxel_kpa;  // >= 0
  bool any_extrapolated = false;
};

struct ForceEstimate {
  Eigen::Vector3d force_n = Eigen::Vector3d::Zero();
  double magnitude_n = 0.0;
  Eigen::Vector2d contact_centroid = Eigen::Vector2d::Zero();
  bool centroid_defined = false;
  bool any_extrapolated = false;
};

/// Per-taxel zero-load pressure offsets, captured at session start and
/// subtracted from every estimate before integration.
struct TareBaseline {
  std::vector<double> pressure_kpa;
};

/// Streams raw frames through the calibration map using the SIMD-dispatched
/// frame kernels. Construction checks the geometry hash against the mesh.
class FrameEvaluator {
 public:
  FrameEvaluator(const CalibrationMap& map, const SkinMesh& mesh);

  /// Per-taxel pressure estimates for one frame (clamped, range-checked).
  std::vector<double> estimate_frame(std::span<const int> raw, bool* any_extrapolated) const;

  /// Estimates minus tare, clamped at zero.
  PressureField reconstruct(std::span<const int> raw, const TareBaseline& tare) const;

  const SkinMesh& mesh() const { return *mesh_; }
  double max_calibrated_pressure() const { return max_pressure_; }

 private:
  const SkinMesh* mesh_;
  double max_pressure_;
  std::array<std::vector<double>, 6> coeff_;
  std::vector<double> center_, inv_half_, raw_lo_, raw_hi_;
};

/// Mean of the given zero-load frames, pushed through the calibration.
TareBaseline capture_tare(const FrameEvaluator& eval,
                          std::span<const std::vector<int>> zero_load_frames);

/// One-shot reconstruction (tests, single frames). Throws GeometryMismatch if
/// the calibration was built for a different mesh.
PressureField reconstruct_field(const SkinMesh& mesh, const CalibrationMap& map,
                                std::span<const int> raw_frame, const TareBaseline& tare);

/// Contact force by facet-wise 3-point edge-midpoint quadrature of p * n over
/// the mesh (exact for the piecewise-linear field), summed with a fixed-order
/// pairwise reduction; kPa * m^2 converted to Newtons.
ForceEstimate integrate_force(const PressureField& field);

/// |estimated - truth| / truth. Throws ZeroTruth when truth <= 0.
double relative_error(double estimated_n, double truth_n);

}  // namespace skincal
