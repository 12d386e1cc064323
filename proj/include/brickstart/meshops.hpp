#pragma once

// Post-processing of finished models: smoothing, scaling, lattice
// conversion, primitive merging and balance checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "brickstart/detail/cell_surface.hpp"
#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/mesh.hpp"
#include "brickstart/reconstruct.hpp"

namespace brickstart {

// --- smoothing --------------------------------------------------------------

struct SmoothParams {
  int iterations = 10;
  double lambda = 0.5;
  double mu = -0.53;
  /// Rescale about the centre of mass after every iteration so the enclosed
  /// volume stays at its starting value.
  bool preserve_volume = true;
};

/// Taubin smoothing with the uniform (umbrella) Laplacian. One iteration is
/// a shrinking step with lambda followed by an inflating step with mu.
/// Coarse brick meshes are mostly "high frequency" for the umbrella
/// operator, so lambda/mu alone still loses a lot of volume on them; the
/// volume correction takes care of that.
inline TriangleMesh smooth(const TriangleMesh& m, const SmoothParams& params = {}) {
  if (params.iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "smooth", "iterations must be at least 1");
  }
  if (!std::isfinite(params.lambda) || !std::isfinite(params.mu)) {
    throw Error(ErrorCode::InvalidArgument, "smooth", "lambda and mu must be finite");
  }
  require_watertight(m, "smooth");

  const std::size_t nv = m.vertex_count();
  std::vector<std::vector<std::uint32_t>> nbr(nv);
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      nbr[t[k]].push_back(t[(k + 1) % 3]);
      nbr[t[k]].push_back(t[(k + 2) % 3]);
    }
  }
  for (auto& n : nbr) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }

  std::vector<Vec3> pos = m.vertices();
  std::vector<Vec3> next(nv);
  auto step = [&](double factor) {
    if (factor == 0.0) return;
    for (std::size_t i = 0; i < nv; ++i) {
      if (nbr[i].empty()) {
        next[i] = pos[i];
        continue;
      }
      Vec3 avg{};
      for (auto j : nbr[i]) avg += pos[j];
      avg = avg / static_cast<double>(nbr[i].size());
      next[i] = pos[i] + (avg - pos[i]) * factor;
    }
    pos.swap(next);
  };
  const double v0 = signed_volume(m);
  for (int it = 0; it < params.iterations; ++it) {
    step(params.lambda);
    step(params.mu);
    if (!params.preserve_volume || (params.lambda == 0.0 && params.mu == 0.0)) continue;
    const TriangleMesh cur = m.with_vertices(pos);
    const double v = signed_volume(cur);
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "smooth", "smoothing collapsed the mesh");
    const double k = std::cbrt(v0 / v);
    const Vec3 c = center_of_mass(cur);
    for (auto& p : pos) p = c + (p - c) * k;
  }
  return m.with_vertices(std::move(pos));
}

// --- scaling ----------------------------------------------------------------

inline Vec3 vertex_centroid(const TriangleMesh& m) {
  Vec3 c{};
  if (m.vertex_count() == 0) return c;
  for (const auto& v : m.vertices()) c += v;
  return c / static_cast<double>(m.vertex_count());
}

/// Uniform scale about the vertex centroid.
inline TriangleMesh scale(const TriangleMesh& m, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidArgument, "scale", "scale factor must be positive");
  }
  const Vec3 c = vertex_centroid(m);
  const Vec3 shift = c * (1.0 - factor);
  std::vector<Vec3> pos;
  pos.reserve(m.vertex_count());
  for (const auto& v : m.vertices()) pos.push_back(v * factor + shift);
  return m.with_vertices(std::move(pos));
}

/// Same transform applied to a voxel solid: cell sizes and origin move with
/// the mesh so later voxel stages stay aligned with it.
inline VoxelSolid scale_solid(const VoxelSolid& s, const Vec3& centre, double factor) {
  VoxelSolid out = s;
  const CellDimensions& c = s.cell();
  out.set_cell({c.width_mm * factor, c.depth_mm * factor, c.height_mm * factor});
  out.set_origin(s.origin() * factor + centre * (1.0 - factor));
  return out;
}

// --- lattice ----------------------------------------------------------------

inline constexpr double kDefaultStrutMm = 2.0;

/// Marks empty voxels that cannot be reached from outside the grid.
inline VoxelSolid fill_cavities(const VoxelSolid& s) {
  const int nx = s.nx() + 2, ny = s.ny() + 2, nz = s.nz() + 2;
  auto idx = [&](int x, int y, int z) { return static_cast<std::size_t>(x) + nx * (y + static_cast<std::size_t>(ny) * z); };
  auto solid = [&](int x, int y, int z) { return s.get(x - 1, y - 1, z - 1); };
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(nx) * ny * nz, 0);
  std::vector<std::array<int, 3>> stack{{0, 0, 0}};
  outside[0] = 1;
  static constexpr int dirs[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (!stack.empty()) {
    const auto p = stack.back();
    stack.pop_back();
    for (const auto& d : dirs) {
      const int x = p[0] + d[0], y = p[1] + d[1], z = p[2] + d[2];
      if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) continue;
      if (outside[idx(x, y, z)] || solid(x, y, z)) continue;
      outside[idx(x, y, z)] = 1;
      stack.push_back({x, y, z});
    }
  }
  VoxelSolid out = s;
  for (int z = 0; z < s.nz(); ++z)
    for (int y = 0; y < s.ny(); ++y)
      for (int x = 0; x < s.nx(); ++x)
        if (!outside[idx(x + 1, y + 1, z + 1)]) out.set(x, y, z, true);
  return out;
}

/// Replaces the solid by square struts of the given thickness running along
/// every edge of its outer boundary faces. Each strut is centred on its edge
/// and clipped to the solid, so the result never leaves the original shape.
/// Enclosed cavities are filled first: their walls would otherwise become a
/// separate floating frame.
inline TriangleMesh lattice(const VoxelSolid& input, double strut_mm = kDefaultStrutMm) {
  const CellDimensions& cell = input.cell();
  if (!(strut_mm > 0.0) || !std::isfinite(strut_mm)) {
    throw Error(ErrorCode::InvalidArgument, "lattice", "strut thickness must be positive");
  }
  const double min_cell = std::min({cell.width_mm, cell.height_mm, cell.depth_mm});
  if (strut_mm >= min_cell) {
    throw Error(ErrorCode::InvalidArgument, "lattice",
                "strut thickness " + std::to_string(strut_mm) + " mm must be below the smallest cell size " +
                    std::to_string(min_cell) + " mm");
  }
  if (input.count() == 0) throw Error(ErrorCode::EmptySolid, "lattice", "voxel solid is empty");
  if (connected_components(input).count > 1) {
    throw Error(ErrorCode::Disconnected, "lattice", "solid has disconnected parts");
  }
  const VoxelSolid s = fill_cavities(input);

  // A lattice point or edge is on the boundary when the voxels around it are
  // mixed: the cells around it are face-connected, so some boundary face
  // then contains it.
  auto mixed_vertex = [&](int i, int j, int k) {
    int n = 0;
    for (int d = 0; d < 8; ++d) n += s.get(i - 1 + (d & 1), j - 1 + ((d >> 1) & 1), k - 1 + (d >> 2));
    return n > 0 && n < 8;
  };
  // Edge along `axis` starting at lattice point p.
  auto mixed_edge = [&](int axis, std::array<int, 3> p) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    int n = 0;
    for (int d = 0; d < 4; ++d) {
      std::array<int, 3> q = p;
      q[u] -= 1 - (d & 1);
      q[v] -= 1 - (d >> 1);
      n += s.get(q[0], q[1], q[2]);
    }
    return n > 0 && n < 4;
  };

  const std::array<int, 3> dims{s.nx(), s.ny(), s.nz()};
  const std::array<double, 3> step{cell.width_mm, cell.height_mm, cell.depth_mm};
  const double h = strut_mm / 2.0;
  std::array<int, 3> n;
  std::array<std::vector<double>, 3> coords;
  for (int a = 0; a < 3; ++a) {
    n[a] = 3 * dims[a];
    for (int i = 0; i < dims[a]; ++i) {
      const double lo = s.origin()[a] + i * step[a];
      coords[a].push_back(lo);
      coords[a].push_back(lo + h);
      coords[a].push_back(lo + step[a] - h);
    }
    coords[a].push_back(s.origin()[a] + dims[a] * step[a]);
  }

  auto occupied = [&](int I, int J, int K) {
    const std::array<int, 3> vox{I / 3, J / 3, K / 3};
    if (!s.at(vox[0], vox[1], vox[2])) return false;
    const std::array<int, 3> local{I % 3, J % 3, K % 3};
    int extreme = 0, middle_axis = -1;
    std::array<int, 3> lattice_pt{};
    for (int a = 0; a < 3; ++a) {
      if (local[a] == 1) {
        middle_axis = a;
        lattice_pt[a] = vox[a];
      } else {
        ++extreme;
        lattice_pt[a] = vox[a] + (local[a] == 2 ? 1 : 0);
      }
    }
    if (extreme == 3) return mixed_vertex(lattice_pt[0], lattice_pt[1], lattice_pt[2]);
    if (extreme == 2) return mixed_edge(middle_axis, lattice_pt);
    return false;
  };
  return detail::grid_boundary_mesh(n, coords, occupied);
}

// --- primitives and voxel booleans -----------------------------------------

enum class PrimitiveKind { Cube, Sphere };

inline std::string_view to_string(PrimitiveKind k) { return k == PrimitiveKind::Cube ? "cube" : "sphere"; }

inline PrimitiveKind parse_primitive_kind(std::string_view s) {
  if (s == "cube") return PrimitiveKind::Cube;
  if (s == "sphere") return PrimitiveKind::Sphere;
  throw Error(ErrorCode::InvalidArgument, "merge", "unknown primitive '" + std::string(s) + "'");
}

/// Cube: edge length `scale`. Sphere: diameter `scale`, tessellated with
/// `segments` meridians and segments / 2 bands. Both centred on `translation`.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Cube;
  Vec3 translation{};
  double scale = 1.0;
  int segments = 32;

  void validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorCode::InvalidArgument, "merge", "primitive scale must be positive");
    }
    if (kind == PrimitiveKind::Sphere && segments < 4) {
      throw Error(ErrorCode::InvalidArgument, "merge", "sphere needs at least 4 segments");
    }
  }
};

inline TriangleMesh primitive_mesh(const Primitive& p) {
  p.validate();
  if (p.kind == PrimitiveKind::Cube) {
    const double e = p.scale;
    VoxelSolid s(1, 1, 1, {e, e, e}, p.translation - Vec3{e / 2, e / 2, e / 2});
    s.set(0, 0, 0, true);
    return solid_to_mesh(s);
  }
  const int seg = p.segments;
  const int bands = std::max(2, seg / 2);
  const double r = p.scale / 2.0;
  std::vector<Vec3> v;
  v.push_back(p.translation + Vec3{0, -r, 0});  // south pole
  for (int b = 1; b < bands; ++b) {
    const double phi = -std::numbers::pi / 2 + std::numbers::pi * b / bands;
    for (int s = 0; s < seg; ++s) {
      const double theta = 2 * std::numbers::pi * s / seg;
      v.push_back(p.translation +
                  Vec3{r * std::cos(phi) * std::cos(theta), r * std::sin(phi), -r * std::cos(phi) * std::sin(theta)});
    }
  }
  v.push_back(p.translation + Vec3{0, r, 0});
  const auto north = static_cast<std::uint32_t>(v.size() - 1);
  auto ring = [&](int b, int s) { return static_cast<std::uint32_t>(1 + (b - 1) * seg + (s % seg)); };
  std::vector<Triangle> t;
  for (int s = 0; s < seg; ++s) t.push_back({0, ring(1, s + 1), ring(1, s)});
  for (int b = 1; b + 1 < bands; ++b) {
    for (int s = 0; s < seg; ++s) {
      t.push_back({ring(b, s), ring(b + 1, s + 1), ring(b + 1, s)});
      t.push_back({ring(b, s), ring(b, s + 1), ring(b + 1, s + 1)});
    }
  }
  for (int s = 0; s < seg; ++s) t.push_back({north, ring(bands - 1, s), ring(bands - 1, s + 1)});
  return TriangleMesh(std::move(v), std::move(t));
}

namespace detail {

/// Integer box of voxels on the world grid of pitch `res`.
struct VoxelWindow {
  std::array<long long, 3> lo{}, hi{};  // inclusive lo, exclusive hi
  int size(int a) const { return static_cast<int>(hi[a] - lo[a]); }
};

inline VoxelWindow window_for(const BoundingBox& box, double res) {
  VoxelWindow w;
  for (int a = 0; a < 3; ++a) {
    w.lo[a] = static_cast<long long>(std::floor(box.min[a] / res)) - 1;
    w.hi[a] = static_cast<long long>(std::ceil(box.max[a] / res)) + 1;
  }
  return w;
}

/// Orientation of p against edge a->b in the (y, z) plane, evaluated with
/// the endpoints in a fixed order so both triangles sharing the edge get
/// bit-identical answers. Exact zeros are broken by nudging p by
/// (eps, eps^2), which never lands on a vertex or edge.
inline int edge_side(const Vec3& a, const Vec3& b, double py, double pz) {
  const bool flip = std::tie(b.y, b.z) < std::tie(a.y, a.z);
  const Vec3& p0 = flip ? b : a;
  const Vec3& p1 = flip ? a : b;
  const double dy = p1.y - p0.y, dz = p1.z - p0.z;
  double o = dy * (pz - p0.z) - dz * (py - p0.y);
  if (o == 0.0) o = -dz;
  if (o == 0.0) o = dy;
  const int s = o > 0 ? 1 : -1;
  return flip ? -s : s;
}

/// Inside test for voxel centres by crossing counts along +x, with
/// orientation-signed crossings (non-zero winding).
inline std::vector<std::uint8_t> voxelize(const TriangleMesh& m, const VoxelWindow& w, double res) {
  const int nx = w.size(0), ny = w.size(1), nz = w.size(2);
  std::vector<std::vector<std::pair<double, int>>> hits(static_cast<std::size_t>(ny) * nz);
  const auto& V = m.vertices();
  for (const auto& t : m.triangles()) {
    const Vec3 &a = V[t[0]], &b = V[t[1]], &c = V[t[2]];
    const double area = (b.y - a.y) * (c.z - a.z) - (b.z - a.z) * (c.y - a.y);
    if (area == 0.0) continue;  // edge-on in projection
    const double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
    const double zmin = std::min({a.z, b.z, c.z}), zmax = std::max({a.z, b.z, c.z});
    const long long j0 = std::max<long long>(w.lo[1], static_cast<long long>(std::floor(ymin / res - 0.5)));
    const long long j1 = std::min<long long>(w.hi[1] - 1, static_cast<long long>(std::ceil(ymax / res - 0.5)));
    const long long k0 = std::max<long long>(w.lo[2], static_cast<long long>(std::floor(zmin / res - 0.5)));
    const long long k1 = std::min<long long>(w.hi[2] - 1, static_cast<long long>(std::ceil(zmax / res - 0.5)));
    const int sign = area > 0 ? 1 : -1;
    for (long long k = k0; k <= k1; ++k) {
      const double pz = (static_cast<double>(k) + 0.5) * res;
      for (long long j = j0; j <= j1; ++j) {
        const double py = (static_cast<double>(j) + 0.5) * res;
        const int s0 = edge_side(a, b, py, pz), s1 = edge_side(b, c, py, pz), s2 = edge_side(c, a, py, pz);
        if (s0 != sign || s1 != sign || s2 != sign) continue;
        // x of the triangle's plane at (py, pz)
        const double l1 = ((py - a.y) * (c.z - a.z) - (pz - a.z) * (c.y - a.y)) / area;
        const double l2 = ((b.y - a.y) * (pz - a.z) - (b.z - a.z) * (py - a.y)) / area;
        const double x = a.x + l1 * (b.x - a.x) + l2 * (c.x - a.x);
        hits[static_cast<std::size_t>(j - w.lo[1]) + static_cast<std::size_t>(ny) * (k - w.lo[2])].push_back({x, sign});
      }
    }
  }
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(nx) * ny * nz, 0);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      auto& row = hits[static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k];
      if (row.empty()) continue;
      std::sort(row.begin(), row.end());
      std::size_t h = 0;
      int winding = 0;
      for (int i = 0; i < nx; ++i) {
        const double px = (static_cast<double>(w.lo[0] + i) + 0.5) * res;
        while (h < row.size() && row[h].first < px) winding += row[h++].second;
        // Outward-wound surfaces give -1 inside with this sign convention;
        // any non-zero winding counts as inside.
        if (winding != 0) occ[static_cast<std::size_t>(i) + nx * (j + static_cast<std::size_t>(ny) * k)] = 1;
      }
    }
  }
  return occ;
}

}  // namespace detail

inline constexpr double kDefaultMergeResolutionMm = 1.0;

struct MergeResult {
  TriangleMesh mesh;
  VoxelSolid solid;
  std::vector<Warning> warnings;
};

/// Boolean union of two closed meshes, resampled on a world-aligned grid of
/// pitch `resolution_mm`. Symmetric in its arguments.
inline MergeResult voxel_union(const TriangleMesh& a, const TriangleMesh& b,
                               double resolution_mm = kDefaultMergeResolutionMm) {
  if (!(resolution_mm > 0.0) || !std::isfinite(resolution_mm)) {
    throw Error(ErrorCode::InvalidArgument, "merge", "resolution must be positive");
  }
  require_watertight(a, "merge");
  require_watertight(b, "merge");
  const BoundingBox ba = bounding_box(a), bb = bounding_box(b);
  const double feature = std::min({ba.extent().x, ba.extent().y, ba.extent().z, bb.extent().x, bb.extent().y,
                                   bb.extent().z});
  if (resolution_mm > feature) {
    throw Error(ErrorCode::ResolutionTooCoarse, "merge",
                "resolution " + std::to_string(resolution_mm) + " mm exceeds smallest extent " +
                    std::to_string(feature) + " mm");
  }
  BoundingBox all = ba;
  all.expand(bb.min);
  all.expand(bb.max);
  const auto w = detail::window_for(all, resolution_mm);
  const auto oa = detail::voxelize(a, w, resolution_mm);
  const auto ob = detail::voxelize(b, w, resolution_mm);

  const double r = resolution_mm;
  VoxelSolid s(w.size(0), w.size(1), w.size(2), {r, r, r},
               Vec3{static_cast<double>(w.lo[0]) * r, static_cast<double>(w.lo[1]) * r, static_cast<double>(w.lo[2]) * r});
  bool touching = false;
  for (int z = 0; z < s.nz(); ++z) {
    for (int y = 0; y < s.ny(); ++y) {
      for (int x = 0; x < s.nx(); ++x) {
        const std::size_t i = s.index(x, y, z);
        s.set(x, y, z, oa[i] || ob[i]);
        if (!oa[i] || touching) continue;
        static constexpr int dirs[7][3] = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        for (const auto& d : dirs) {
          const int X = x + d[0], Y = y + d[1], Z = z + d[2];
          if (s.in_bounds(X, Y, Z) && ob[s.index(X, Y, Z)]) touching = true;
        }
      }
    }
  }
  if (s.count() == 0) {
    throw Error(ErrorCode::ResolutionTooCoarse, "merge", "no voxel centre falls inside either solid");
  }
  MergeResult out{solid_to_mesh(s), s, {}};
  if (!touching) {
    out.warnings.push_back({std::string(kWarnDisjointPrimitive), "primitive does not touch the model"});
  }
  return out;
}

inline MergeResult merge_primitive(const TriangleMesh& m, const Primitive& prim,
                                   double resolution_mm = kDefaultMergeResolutionMm) {
  return voxel_union(m, primitive_mesh(prim), resolution_mm);
}

// --- balance ----------------------------------------------------------------

enum class UpAxis { X, Y, Z };

inline std::string_view to_string(UpAxis a) { return a == UpAxis::X ? "x" : (a == UpAxis::Y ? "y" : "z"); }

inline UpAxis parse_up_axis(std::string_view s) {
  if (s == "x") return UpAxis::X;
  if (s == "y") return UpAxis::Y;
  if (s == "z") return UpAxis::Z;
  throw Error(ErrorCode::InvalidArgument, "balance", "up axis must be x, y or z");
}

struct Point2 {
  double u = 0.0, v = 0.0;
  bool operator==(const Point2&) const = default;
};

struct BalanceReport {
  Vec3 center_of_mass;
  std::vector<Point2> support_polygon;  // counter-clockwise, in the two non-up axes
  bool stable = false;
  double margin_mm = 0.0;  // positive inside the support polygon
};

inline constexpr double kContactToleranceMm = 0.5;

namespace detail {

inline double cross2(const Point2& o, const Point2& a, const Point2& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

/// Andrew's monotone chain; collinear points dropped.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

inline double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double du = b.u - a.u, dv = b.v - a.v;
  const double len2 = du * du + dv * dv;
  double t = len2 > 0 ? ((p.u - a.u) * du + (p.v - a.v) * dv) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.u - (a.u + t * du), p.v - (a.v + t * dv));
}

}  // namespace detail

inline BalanceReport balance_report(const TriangleMesh& m, UpAxis up = UpAxis::Y) {
  require_watertight(m, "balance");
  const int ua = static_cast<int>(up);
  const int a0 = (ua + 1) % 3, a1 = (ua + 2) % 3;
  BalanceReport r;
  r.center_of_mass = center_of_mass(m);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& v : m.vertices()) lowest = std::min(lowest, v[ua]);
  std::vector<Point2> contact;
  for (const auto& v : m.vertices())
    if (v[ua] <= lowest + kContactToleranceMm) contact.push_back({v[a0], v[a1]});
  r.support_polygon = detail::convex_hull(std::move(contact));

  const Point2 p{r.center_of_mass[a0], r.center_of_mass[a1]};
  const auto& h = r.support_polygon;
  double dist = std::numeric_limits<double>::infinity();
  bool inside = h.size() >= 3;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Point2& a = h[i];
    const Point2& b = h[(i + 1) % h.size()];
    dist = std::min(dist, detail::segment_distance(p, a, b));
    if (h.size() >= 3 && detail::cross2(a, b, p) <= 0) inside = false;
  }
  r.margin_mm = inside ? dist : -dist;
  // Relative tolerance: a centre of mass exactly on the rim is not stable,
  // whatever the rounding, and the verdict must not depend on model size.
  r.stable = r.margin_mm > 1e-9 * norm(bounding_box(m).extent());
  return r;
}

}  // namespace brickstart
