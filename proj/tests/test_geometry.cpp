// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <random>

#include "skincal/errors.hpp"
#include "skincal/geometry.hpp"

using skincal::build_mesh;
using skincal::build_mesh_from_points;
using skincal::DegenerateLayout;
using skincal::make_strip_layout;
using skincal::OutOfDomain;
using skincal::RigidTransform;
using skincal::SkinMesh;
using skincal::TaxelLayout;
using skincal::TriangleModule;

namespace {

// independent convex-hull oracle (monotone chain), used to derive the
// expected facet count of any triangulation: 2*interior + hull - 2
std::vector<Eigen::Vector2d> hull_of(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> h;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = h.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[pass ? pts.size() - 1 - i : i];
      while (h.size() >= base + 2 && cross(h[h.size() - 2], h.back(), p) <= 1e-18) h.pop_back();
      h.push_back(p);
    }
    h.pop_back();
  }
  return h;
}

double hull_area_oracle(const std::vector<Eigen::Vector2d>& pts) {
  const auto h = hull_of(pts);
  double a2 = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& p = h[i];
    const auto& q = h[(i + 1) % h.size()];
    a2 += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * std::abs(a2);
}

int expected_facets(const std::vector<Eigen::Vector2d>& pts) {
  // Euler count for a full triangulation: 2*interior + boundary - 2, where
  // boundary includes collinear points lying on hull edges
  const auto h = hull_of(pts);
  int boundary = 0;
  for (const auto& p : pts) {
    bool on_edge = false;
    for (std::size_t i = 0; i < h.size() && !on_edge; ++i) {
      const Eigen::Vector2d& a = h[i];
      const Eigen::Vector2d& b = h[(i + 1) % h.size()];
      const Eigen::Vector2d ab = b - a;
      const double cross = ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x());
      if (std::abs(cross) > 1e-12 * ab.norm()) continue;
      const double t = ab.dot(p - a) / ab.squaredNorm();
      on_edge = t >= -1e-12 && t <= 1.0 + 1e-12;
    }
    if (on_edge) ++boundary;
  }
  const int interior = static_cast<int>(pts.size()) - boundary;
  return 2 * interior + boundary - 2;
}

TaxelLayout single_module() {
  TaxelLayout layout;
  layout.units_per_side = 0.03;
  layout.triangles.push_back(TriangleModule{});
  return layout;
}

}  // namespace

TEST_CASE("single canonical module meshes to 10 vertices and 9 facets") {
  const SkinMesh mesh = build_mesh(single_module());
  CHECK(mesh.taxel_count() == 10);

  std::vector<Eigen::Vector2d> pts(mesh.taxel_positions.begin(), mesh.taxel_positions.end());
  const int expected = expected_facets(pts);
  CHECK(expected == 9);
  CHECK(static_cast<int>(mesh.facets.size()) == expected);
}

TEST_CASE("degenerate layouts are rejected") {
  CHECK_THROWS_AS(build_mesh(TaxelLayout{}), DegenerateLayout);

  TaxelLayout dup = single_module();
  dup.triangles.push_back(TriangleModule{});  // same origin and orientation
  dup.triangles.back().module_id = 1;
  CHECK_THROWS_AS(build_mesh(dup), DegenerateLayout);

  const Eigen::Vector2d line[] = {{0.0, 0.0}, {0.01, 0.0}, {0.02, 0.0}, {0.03, 0.0}};
  CHECK_THROWS_AS(build_mesh_from_points(line), DegenerateLayout);

  const Eigen::Vector2d twin[] = {{0.0, 0.0}, {0.0, 0.0}, {0.01, 0.01}};
  CHECK_THROWS_AS(build_mesh_from_points(twin), DegenerateLayout);
}

TEST_CASE("interpolation on one facet: centroid, vertices, zero edge") {
  const Eigen::Vector2d tri[] = {{0.0, 0.0}, {0.01, 0.0}, {0.0, 0.01}};
  const SkinMesh mesh = build_mesh_from_points(tri);
  REQUIRE(mesh.facets.size() == 1);

  const double p[] = {10.0, 20.0, 30.0};
  const Eigen::Vector2d centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
  CHECK(skincal::interpolate_pressure(mesh, p, centroid) == doctest::Approx(20.0).epsilon(1e-12));

  const double q[] = {42.0, 1.0, 2.0};
  CHECK(skincal::interpolate_pressure(mesh, q, tri[0]) == doctest::Approx(42.0).epsilon(1e-15));

  const double z[] = {0.0, 0.0, 30.0};
  const Eigen::Vector2d edge_mid = 0.5 * (tri[0] + tri[1]);
  CHECK(skincal::interpolate_pressure(mesh, z, edge_mid) == doctest::Approx(0.0).epsilon(1e-15));

  CHECK_THROWS_AS(skincal::interpolate_pressure(mesh, p, {0.02, 0.02}), OutOfDomain);
}

TEST_CASE("interpolation is exact at every taxel position") {
  const SkinMesh mesh = build_mesh(make_strip_layout(5));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 120.0);
  std::vector<double> p(mesh.taxel_count());
  for (auto& v : p) v = u(rng);
  for (std::size_t i = 0; i < mesh.taxel_count(); ++i) {
    const double got = skincal::interpolate_pressure(mesh, p, mesh.taxel_positions[i]);
    CHECK(std::abs(got - p[i]) <= 1e-12 * std::max(1.0, std::abs(p[i])));
  }
}

TEST_CASE("interpolation reproduces affine fields") {
  const SkinMesh mesh = build_mesh(make_strip_layout(6));
  const double alpha = 3.0, beta = 40.0, gamma = -25.0;
  std::vector<double> p(mesh.taxel_count());
  for (std::size_t i = 0; i < mesh.taxel_count(); ++i) {
    p[i] = alpha + beta * mesh.taxel_positions[i].x() + gamma * mesh.taxel_positions[i].y();
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  for (int trial = 0; trial < 500; ++trial) {
    const auto& f = mesh.facets[rng() % mesh.facets.size()];
    double b0 = u01(rng), b1 = u01(rng) * (1.0 - b0);
    const double b2 = 1.0 - b0 - b1;
    const Eigen::Vector2d q = b0 * mesh.taxel_positions[f[0]] + b1 * mesh.taxel_positions[f[1]] +
                              b2 * mesh.taxel_positions[f[2]];
    const double want = alpha + beta * q.x() + gamma * q.y();
    CHECK(std::abs(skincal::interpolate_pressure(mesh, p, q) - want) <= 1e-10);
  }
}

TEST_CASE("facet area and normal") {
  const Eigen::Vector2d tri[] = {{0.0, 0.0}, {0.01, 0.0}, {0.0, 0.01}};
  const SkinMesh mesh = build_mesh_from_points(tri);
  const auto [area, normal] = skincal::facet_area_normal(mesh, 0);
  CHECK(area == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(normal.x() == 0.0);
  CHECK(normal.y() == 0.0);
  CHECK(normal.z() == 1.0);

  const double s = 0.01;
  const Eigen::Vector2d eq[] = {{0.0, 0.0}, {s, 0.0}, {s / 2.0, s * std::sqrt(3.0) / 2.0}};
  const SkinMesh mesh2 = build_mesh_from_points(eq);
  const auto [area2, n2] = skincal::facet_area_normal(mesh2, 0);
  CHECK(area2 == doctest::Approx(std::sqrt(3.0) / 4.0 * s * s).epsilon(1e-12));
  CHECK(n2.norm() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS(skincal::facet_area_normal(mesh2, 5));
}

TEST_CASE("every facet normal is unit length and areas are positive") {
  const SkinMesh mesh = build_mesh(make_strip_layout(23));
  for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
    CHECK(mesh.facet_areas[f] > 0.0);
    CHECK(std::abs(mesh.normals[f].norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("facets cover the taxel hull without overlap") {
  for (int modules : {1, 2, 5, 23}) {
    const SkinMesh mesh = build_mesh(make_strip_layout(modules));
    std::vector<Eigen::Vector2d> pts(mesh.taxel_positions.begin(), mesh.taxel_positions.end());
    const double want = hull_area_oracle(pts);
    CHECK(mesh.total_area() == doctest::Approx(want).epsilon(1e-9));
    CHECK(static_cast<int>(mesh.facets.size()) == expected_facets(pts));
  }
}

TEST_CASE("total area is invariant under rigid patch transforms") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SkinMesh flat = build_mesh(make_strip_layout(4));
  for (int trial = 0; trial < 10; ++trial) {
    RigidTransform frame;
    const Eigen::Vector3d axis = Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized();
    frame.rotation = Eigen::AngleAxisd(u(rng) * 3.0, axis).toRotationMatrix();
    frame.translation = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const SkinMesh moved = build_mesh(make_strip_layout(4), frame);
    CHECK(std::abs(moved.total_area() - flat.total_area()) <= 1e-12 * flat.total_area());
    for (std::size_t f = 0; f < moved.facets.size(); ++f) {
      const Eigen::Vector3d want = frame.rotation * Eigen::Vector3d::UnitZ();
      CHECK((moved.normals[f] - want).norm() <= 1e-12);
    }
  }
}

TEST_CASE("strip layout produces distinct taxels and a stable hash") {
  const SkinMesh a = build_mesh(make_strip_layout(23));
  CHECK(a.taxel_count() == 230);
  double min_dist = 1e9;
  for (std::size_t i = 0; i < a.taxel_count(); ++i) {
    for (std::size_t j = i + 1; j < a.taxel_count(); ++j) {
      min_dist = std::min(min_dist, (a.taxel_positions[i] - a.taxel_positions[j]).norm());
    }
  }
  CHECK(min_dist > 1e-4);

  const SkinMesh b = build_mesh(make_strip_layout(23));
  CHECK(a.geometry_hash == b.geometry_hash);
  const SkinMesh c = build_mesh(make_strip_layout(22));
  CHECK(a.geometry_hash != c.geometry_hash);
  CHECK(a.geometry_hash.size() == 16);
}

TEST_CASE("module orientation is normalized") {
  TriangleModule mod;
  mod.orientation = -std::numbers::pi;  // same as +pi
  const auto neg = skincal::module_taxel_positions(mod, 0.03);
  mod.orientation = std::numbers::pi;
  const auto pos = skincal::module_taxel_positions(mod, 0.03);
  for (int i = 0; i < 10; ++i) CHECK((neg[i] - pos[i]).norm() <= 1e-12);
}
