// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "skincal/errors.hpp"

namespace skincal {

namespace {

constexpr double kTaxelInset = 0.8;  // lattice shrink factor about the module centroid

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double normalize_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ULL;
  void feed(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ULL;
    }
  }
  void feed_double(double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    feed(&bits, sizeof(bits));
  }
  void feed_int(std::int64_t v) { feed(&v, sizeof(v)); }
};

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[h & 0xF];
    h >>= 4;
  }
  return s;
}

// Lexicographic incremental triangulation of the convex hull of a point set.
// Points are inserted in sorted (u, then v) order; each new point is joined
// to every hull edge it strictly sees, which covers the hull with positive-
// area triangles and no overlaps.
std::vector<std::array<int, 3>> triangulate(const std::vector<Eigen::Vector2d>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return pts[a].y() < pts[b].y();
  });

  Eigen::Vector2d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = (hi - lo).norm();
  const double eps_area = std::max(1e-300, scale * scale * 1e-12);

  std::vector<std::array<int, 3>> facets;
  auto add_facet = [&](int a, int b, int c) {
    if (cross2(pts[b] - pts[a], pts[c] - pts[a]) < 0.0) std::swap(b, c);
    facets.push_back({a, b, c});
  };

  // seed: longest collinear prefix plus the first off-line point
  int seed = -1;
  for (int k = 2; k < n; ++k) {
    if (std::abs(cross2(pts[order[1]] - pts[order[0]], pts[order[k]] - pts[order[0]])) >
        eps_area) {
      seed = k;
      break;
    }
  }
  if (seed < 0) throw DegenerateLayout("all taxel positions are collinear");

  const int apex = order[seed];
  std::vector<int> hull;
  {
    const bool left =
        cross2(pts[order[1]] - pts[order[0]], pts[apex] - pts[order[0]]) > 0.0;
    for (int i = 0; i + 1 < seed; ++i) add_facet(order[i], order[i + 1], apex);
    if (left) {
      for (int i = 0; i < seed; ++i) hull.push_back(order[i]);
    } else {
      for (int i = seed - 1; i >= 0; --i) hull.push_back(order[i]);
    }
    hull.push_back(apex);
  }

  for (int k = seed + 1; k < n; ++k) {
    const int pi = order[k];
    const Eigen::Vector2d& p = pts[pi];
    const int m = static_cast<int>(hull.size());
    std::vector<bool> vis(m);
    int visible_count = 0;
    for (int i = 0; i < m; ++i) {
      const Eigen::Vector2d& a = pts[hull[i]];
      const Eigen::Vector2d& b = pts[hull[(i + 1) % m]];
      vis[i] = cross2(b - a, p - a) < -eps_area;
      if (vis[i]) ++visible_count;
    }
    if (visible_count == 0) {
      // p sits on a hull edge to within rounding (distinct module arithmetic
      // can land taxels ulps apart in sort order); splice it into that edge
      bool inserted = false;
      for (int i = 0; i < m && !inserted; ++i) {
        const Eigen::Vector2d& a = pts[hull[i]];
        const Eigen::Vector2d& b = pts[hull[(i + 1) % m]];
        const Eigen::Vector2d ab = b - a;
        if (std::abs(cross2(ab, p - a)) > eps_area) continue;
        const double t = ab.dot(p - a) / ab.squaredNorm();
        if (t > 0.0 && t < 1.0) {
          hull.insert(hull.begin() + i + 1, pi);
          inserted = true;
        }
      }
      if (!inserted) {
        throw DegenerateLayout("taxel positions too close to collinear for triangulation");
      }
      continue;
    }
    if (visible_count == m) {
      throw DegenerateLayout("taxel positions too close to collinear for triangulation");
    }
    int run_start = -1;
    for (int i = 0; i < m; ++i) {
      if (vis[i] && !vis[(i + m - 1) % m]) {
        run_start = i;
        break;
      }
    }
    int run_end = run_start;
    while (vis[(run_end + 1) % m]) run_end = (run_end + 1) % m;

    for (int i = run_start;; i = (i + 1) % m) {
      add_facet(hull[i], hull[(i + 1) % m], pi);
      if (i == run_end) break;
    }
    std::vector<int> next;
    next.reserve(m + 1);
    for (int i = (run_end + 1) % m;; i = (i + 1) % m) {
      next.push_back(hull[i]);
      if (i == run_start) break;
    }
    next.push_back(pi);
    hull = std::move(next);
  }
  return facets;
}

double hull_area(const std::vector<Eigen::Vector2d>& pts) {
  // monotone chain hull, then shoelace
  std::vector<Eigen::Vector2d> s = pts;
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() < b.y();
  });
  auto build = [&](bool lower) {
    std::vector<Eigen::Vector2d> chain;
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      const auto& p = lower ? s[idx] : s[s.size() - 1 - idx];
      while (chain.size() >= 2 &&
             cross2(chain.back() - chain[chain.size() - 2], p - chain[chain.size() - 2]) <= 0.0) {
        chain.pop_back();
      }
      chain.push_back(p);
    }
    return chain;
  };
  auto lowerc = build(true);
  auto upperc = build(false);
  lowerc.pop_back();
  upperc.pop_back();
  lowerc.insert(lowerc.end(), upperc.begin(), upperc.end());
  double a2 = 0.0;
  for (std::size_t i = 0; i < lowerc.size(); ++i) {
    a2 += cross2(lowerc[i], lowerc[(i + 1) % lowerc.size()]);
  }
  return 0.5 * std::abs(a2);
}

std::string compute_hash(const SkinMesh& mesh) {
  Fnv1a h;
  h.feed_int(static_cast<std::int64_t>(mesh.taxel_positions.size()));
  for (const auto& p : mesh.taxel_positions) {
    h.feed_double(p.x());
    h.feed_double(p.y());
  }
  for (bool c : mesh.cut) h.feed_int(c ? 1 : 0);
  h.feed_int(static_cast<std::int64_t>(mesh.facets.size()));
  for (const auto& f : mesh.facets) {
    h.feed_int(f[0]);
    h.feed_int(f[1]);
    h.feed_int(f[2]);
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) h.feed_double(mesh.patch_frame.rotation(r, c));
    h.feed_double(mesh.patch_frame.translation(r));
  }
  return hash_hex(h.state);
}

SkinMesh finish_mesh(std::vector<Eigen::Vector2d> positions, std::vector<bool> cut,
                     const RigidTransform& frame) {
  const int n = static_cast<int>(positions.size());
  if (n == 0) throw DegenerateLayout("empty layout");
  // snap to a 1 nm grid: coordinates produced by different module transforms
  // may differ by ulps, which would scramble the lexicographic insertion order
  for (auto& p : positions) {
    p.x() = std::round(p.x() * 1e9) / 1e9;
    p.y() = std::round(p.y() * 1e9) / 1e9;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((positions[i] - positions[j]).norm() <= 1e-9) {
        throw DegenerateLayout("taxels " + std::to_string(i) + " and " + std::to_string(j) +
                               " coincide");
      }
    }
  }
  if (n < 3) throw DegenerateLayout("need at least 3 taxels to triangulate");

  SkinMesh mesh;
  mesh.taxel_positions = std::move(positions);
  mesh.cut = std::move(cut);
  mesh.patch_frame = frame;
  mesh.facets = triangulate(mesh.taxel_positions);

  mesh.facet_areas.reserve(mesh.facets.size());
  mesh.normals.reserve(mesh.facets.size());
  const Eigen::Vector3d plane_normal = frame.rotation * Eigen::Vector3d::UnitZ();
  mesh.lumped_areas.assign(mesh.taxel_positions.size(), 0.0);
  for (const auto& f : mesh.facets) {
    const auto& a = mesh.taxel_positions[f[0]];
    const auto& b = mesh.taxel_positions[f[1]];
    const auto& c = mesh.taxel_positions[f[2]];
    const double area = 0.5 * cross2(b - a, c - a);
    if (!(area > 0.0)) throw DegenerateLayout("degenerate facet in triangulation");
    mesh.facet_areas.push_back(area);
    mesh.normals.push_back(plane_normal);
    for (int v : f) mesh.lumped_areas[v] += area / 3.0;
  }

  const double covered = hull_area(mesh.taxel_positions);
  double total = 0.0;
  for (double a : mesh.facet_areas) total += a;
  if (std::abs(total - covered) > 1e-9 * covered) {
    throw DegenerateLayout("triangulation does not cover the taxel hull");
  }

  mesh.geometry_hash = compute_hash(mesh);
  return mesh;
}

}  // namespace

double SkinMesh::total_area() const {
  double s = 0.0;
  for (double a : facet_areas) s += a;
  return s;
}

std::array<Eigen::Vector2d, 10> module_taxel_positions(const TriangleModule& mod,
                                                       double units_per_side) {
  const double L = units_per_side;
  const double row_h = L / 3.0 * std::numbers::sqrt3 / 2.0;
  const Eigen::Vector2d centroid(L / 2.0, L / (2.0 * std::numbers::sqrt3));

  std::array<Eigen::Vector2d, 10> local;
  int idx = 0;
  for (int row = 0; row < 4; ++row) {            // bottom row of 4 up to apex
    for (int k = 0; k <= 3 - row; ++k) {
      const Eigen::Vector2d q(row * L / 6.0 + k * L / 3.0, row * row_h);
      local[idx++] = centroid + kTaxelInset * (q - centroid);
    }
  }

  const double th = normalize_angle(mod.orientation);
  const double c = std::cos(th), s = std::sin(th);
  std::array<Eigen::Vector2d, 10> world;
  for (int i = 0; i < 10; ++i) {
    world[i] = mod.origin + Eigen::Vector2d(c * local[i].x() - s * local[i].y(),
                                            s * local[i].x() + c * local[i].y());
  }
  return world;
}

SkinMesh build_mesh(const TaxelLayout& layout, const RigidTransform& frame) {
  if (layout.triangles.empty()) throw DegenerateLayout("empty layout");
  std::vector<Eigen::Vector2d> positions;
  std::vector<bool> cut;
  positions.reserve(layout.triangles.size() * 10);
  cut.reserve(layout.triangles.size() * 10);
  for (const auto& mod : layout.triangles) {
    const auto pts = module_taxel_positions(mod, layout.units_per_side);
    for (int i = 0; i < 10; ++i) {
      positions.push_back(pts[i]);
      cut.push_back(mod.cut_mask[i]);
    }
  }
  return finish_mesh(std::move(positions), std::move(cut), frame);
}

SkinMesh build_mesh_from_points(std::span<const Eigen::Vector2d> positions,
                                std::span<const bool> cut, const RigidTransform& frame) {
  std::vector<Eigen::Vector2d> pos(positions.begin(), positions.end());
  std::vector<bool> c(pos.size(), false);
  for (std::size_t i = 0; i < cut.size() && i < c.size(); ++i) c[i] = cut[i];
  return finish_mesh(std::move(pos), std::move(c), frame);
}

double interpolate_pressure(const SkinMesh& mesh, std::span<const double> taxel_pressures,
                            const Eigen::Vector2d& q) {
  for (std::size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const auto& f = mesh.facets[fi];
    const auto& a = mesh.taxel_positions[f[0]];
    const auto& b = mesh.taxel_positions[f[1]];
    const auto& c = mesh.taxel_positions[f[2]];
    const double denom = cross2(b - a, c - a);
    const double wa = cross2(b - q, c - q);
    const double wb = cross2(c - q, a - q);
    const double wc = cross2(a - q, b - q);
    const double tol = -1e-9 * denom;
    if (wa >= tol && wb >= tol && wc >= tol) {
      return (wa * taxel_pressures[f[0]] + wb * taxel_pressures[f[1]] +
              wc * taxel_pressures[f[2]]) /
             denom;
    }
  }
  throw OutOfDomain("query point lies outside the skin mesh");
}

std::pair<double, Eigen::Vector3d> facet_area_normal(const SkinMesh& mesh,
                                                     std::size_t facet_index) {
  return {mesh.facet_areas.at(facet_index), mesh.normals.at(facet_index)};
}

TaxelLayout make_strip_layout(int module_count, double units_per_side) {
  TaxelLayout layout;
  layout.units_per_side = units_per_side;
  const double L = units_per_side;
  const double h = L * std::numbers::sqrt3 / 2.0;
  constexpr int kPerRow = 8;
  for (int m = 0; m < module_count; ++m) {
    const int row = m / kPerRow;
    const int slot = m % kPerRow;
    TriangleModule mod;
    mod.module_id = m;
    if (slot % 2 == 0) {
      mod.origin = Eigen::Vector2d(slot * L / 2.0, row * h);
      mod.orientation = 0.0;
    } else {
      mod.origin = Eigen::Vector2d(slot * L / 2.0 + L, row * h + h);
      mod.orientation = std::numbers::pi;
    }
    layout.triangles.push_back(mod);
  }
  return layout;
}

}  // namespace skincal
