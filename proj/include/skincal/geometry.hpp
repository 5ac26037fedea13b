// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace skincal {

/// Places the (u,v) parameter plane in 3-D space. Identity maps (u,v) to the
/// z=0 plane with outward normal +z.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector2d& uv) const {
    return rotation * Eigen::Vector3d(uv.x(), uv.y(), 0.0) + translation;
  }
};

/// One triangular sensing module carrying 10 taxel slots on a fixed internal
/// lattice. Slots flagged in cut_mask are present in the geometry but marked
/// as trimmed (greatly reduced sensitivity).
struct TriangleModule {
  int module_id = 0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();  // meters
  double orientation = 0.0;                          // radians, normalized to [0, 2*pi)
  std::array<bool, 10> cut_mask{};
};

struct TaxelLayout {
  std::vector<TriangleModule> triangles;
  double units_per_side = 0.03;  // module edge length, meters
};

/// Triangulated taxel-center mesh. Facet vertex order is counter-clockwise in
/// the (u,v) plane; normals are per facet and unit length. Immutable after
/// construction.
struct SkinMesh {
  std::vector<Eigen::Vector2d> taxel_positions;  // indexed by taxel id
  std::vector<bool> cut;                         // per taxel
  std::vector<std::array<int, 3>> facets;
  std::vector<double> facet_areas;          // m^2, positive
  std::vector<Eigen::Vector3d> normals;     // per facet, unit
  std::vector<double> lumped_areas;         // per taxel: integral of its hat function, m^2
  RigidTransform patch_frame;
  std::string geometry_hash;                // 16 hex chars

  std::size_t taxel_count() const { return taxel_positions.size(); }
  double total_area() const;
};

/// Positions of the 10 taxel slots of one module in patch coordinates.
/// The slots sit on a 3-row triangular lattice (rows of 1/2/3/4), pulled in
/// toward the module centroid so taxels of adjacent modules never coincide.
std::array<Eigen::Vector2d, 10> module_taxel_positions(const TriangleModule& mod,
                                                       double units_per_side);

/// Triangulates all taxel centers of the layout into a SkinMesh.
/// Throws DegenerateLayout if the layout is empty, has coincident taxels, or
/// is entirely collinear.
SkinMesh build_mesh(const TaxelLayout& layout, const RigidTransform& frame = {});

/// Mesh straight from explicit taxel positions (test fixtures, custom grids).
SkinMesh build_mesh_from_points(std::span<const Eigen::Vector2d> positions,
                                std::span<const bool> cut = {},
                                const RigidTransform& frame = {});

/// Barycentric-linear interpolation of per-taxel values at a point of the
/// (u,v) plane. Throws OutOfDomain if the point lies outside every facet.
double interpolate_pressure(const SkinMesh& mesh, std::span<const double> taxel_pressures,
                            const Eigen::Vector2d& point);

/// Area (m^2) and unit normal of one facet.
std::pair<double, Eigen::Vector3d> facet_area_normal(const SkinMesh& mesh, std::size_t facet_index);

/// Alternating up/down module strip, rows of at most 8; the stock forearm-
/// scale patch is make_strip_layout(23).
TaxelLayout make_strip_layout(int module_count, double units_per_side = 0.03);

}  // namespace skincal
