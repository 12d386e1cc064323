#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/vec.hpp"

namespace brickstart {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle surface, coordinates in millimetres. Counter-clockwise
/// winding (seen from outside) is the outward orientation.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  /// Rejects out-of-range indices and zero-area triangles.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    for (const auto& t : triangles_) {
      for (auto i : t) {
        if (i >= vertices_.size()) {
          throw Error(ErrorCode::InvalidArgument, "mesh", "triangle index out of range");
        }
      }
      if (is_degenerate(t)) {
        throw Error(ErrorCode::InvalidArgument, "mesh", "degenerate triangle");
      }
    }
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  bool is_degenerate(const Triangle& t) const {
    const Vec3& a = vertices_[t[0]];
    const Vec3& b = vertices_[t[1]];
    const Vec3& c = vertices_[t[2]];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return true;
    const Vec3 n = cross(b - a, c - a);
    const double scale = std::max({dot(b - a, b - a), dot(c - a, c - a), dot(c - b, c - b)});
    return !(dot(n, n) > 1e-24 * scale * scale) || !std::isfinite(dot(n, n));
  }

  /// Same connectivity, new positions.
  TriangleMesh with_vertices(std::vector<Vec3> positions) const {
    if (positions.size() != vertices_.size()) {
      throw Error(ErrorCode::InvalidArgument, "mesh", "vertex count mismatch");
    }
    TriangleMesh out;
    out.vertices_ = std::move(positions);
    out.triangles_ = triangles_;
    return out;
  }

  bool operator==(const TriangleMesh&) const = default;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
};

// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

struct BoundingBox {
  Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  void expand(const Vec3& p) {
    for (int a = 0; a < 3; ++a) {
      min[a] = std::min(min[a], p[a]);
      max[a] = std::max(max[a], p[a]);
    }
  }
  bool valid() const { return min.x <= max.x; }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
};

inline BoundingBox bounding_box(const TriangleMesh& m) {
  BoundingBox box;
  for (const auto& v : m.vertices()) box.expand(v);
  return box;
}

/// Divergence-theorem volume; positive for outward-oriented closed meshes.
inline double signed_volume(const TriangleMesh& m) {
  // Reference point at the bbox centre keeps the per-tetrahedron terms small.
  const Vec3 ref = m.empty() ? Vec3{} : bounding_box(m).center();
  double six_v = 0.0;
  for (const auto& t : m.triangles()) {
    const Vec3 a = m.vertices()[t[0]] - ref;
    const Vec3 b = m.vertices()[t[1]] - ref;
    const Vec3 c = m.vertices()[t[2]] - ref;
    six_v += dot(a, cross(b, c));
  }
  return six_v / 6.0;
}

inline double surface_area(const TriangleMesh& m) {
  double a = 0.0;
  for (const auto& t : m.triangles()) {
    const Vec3& p = m.vertices()[t[0]];
    a += 0.5 * norm(cross(m.vertices()[t[1]] - p, m.vertices()[t[2]] - p));
  }
  return a;
}

/// Uniform-density centre of mass of a closed mesh.
inline Vec3 center_of_mass(const TriangleMesh& m) {
  const Vec3 ref = bounding_box(m).center();
  Vec3 acc{};
  double six_v = 0.0;
  for (const auto& t : m.triangles()) {
    const Vec3 a = m.vertices()[t[0]] - ref;
    const Vec3 b = m.vertices()[t[1]] - ref;
    const Vec3 c = m.vertices()[t[2]] - ref;
    const double w = dot(a, cross(b, c));
    six_v += w;
    acc += (a + b + c) * (w / 4.0);
  }
  if (six_v == 0.0) return ref;
  return ref + acc / six_v;
}

struct EdgeReport {
  bool watertight = true;
  std::size_t edge_count = 0;
  std::size_t boundary_edges = 0;      // used by one triangle
  std::size_t nonmanifold_edges = 0;   // used by three or more
  std::size_t misoriented_edges = 0;   // two triangles, same direction
};

inline EdgeReport edge_report(const TriangleMesh& m) {
  std::unordered_map<std::uint64_t, std::pair<int, int>> uses;  // (a<b) -> (#a->b, #b->a)
  uses.reserve(m.triangle_count() * 3);
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const auto a = t[k], b = t[(k + 1) % 3];
      if (a < b) {
        ++uses[detail::edge_key(a, b)].first;
      } else {
        ++uses[detail::edge_key(b, a)].second;
      }
    }
  }
  EdgeReport r;
  r.edge_count = uses.size();
  for (const auto& [key, c] : uses) {
    const int total = c.first + c.second;
    if (total == 1) {
      ++r.boundary_edges;
    } else if (total > 2) {
      ++r.nonmanifold_edges;
    } else if (c.first != 1 || c.second != 1) {
      ++r.misoriented_edges;
    }
  }
  r.watertight = !m.empty() && r.boundary_edges == 0 && r.nonmanifold_edges == 0 &&
                 r.misoriented_edges == 0;
  return r;
}

inline bool is_watertight(const TriangleMesh& m) { return edge_report(m).watertight; }

/// Number of edge-connected triangle groups.
inline std::size_t shell_count(const TriangleMesh& m) {
  detail::UnionFind uf(m.triangle_count());
  std::unordered_map<std::uint64_t, std::size_t> first_owner;
  first_owner.reserve(m.triangle_count() * 3);
  for (std::size_t i = 0; i < m.triangle_count(); ++i) {
    const auto& t = m.triangles()[i];
    for (int k = 0; k < 3; ++k) {
      auto a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = first_owner.emplace(detail::edge_key(a, b), i);
      if (!inserted) uf.unite(i, it->second);
    }
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.triangle_count(); ++i) n += uf.find(i) == i;
  return n;
}

struct MeshAnalysis {
  double volume_mm3 = 0.0;
  double surface_area_mm2 = 0.0;
  bool watertight = false;
  std::size_t shell_count = 0;
  long long euler_characteristic = 0;
  std::size_t degenerate_triangles = 0;
  BoundingBox bbox;
};

inline MeshAnalysis analyze(const TriangleMesh& m) {
  MeshAnalysis a;
  a.volume_mm3 = signed_volume(m);
  a.surface_area_mm2 = surface_area(m);
  const auto edges = edge_report(m);
  a.watertight = edges.watertight;
  a.shell_count = shell_count(m);
  std::vector<bool> used(m.vertex_count(), false);
  for (const auto& t : m.triangles())
    for (auto i : t) used[i] = true;
  const auto v = static_cast<long long>(std::count(used.begin(), used.end(), true));
  a.euler_characteristic =
      v - static_cast<long long>(edges.edge_count) + static_cast<long long>(m.triangle_count());
  for (const auto& t : m.triangles()) a.degenerate_triangles += m.is_degenerate(t);
  a.bbox = bounding_box(m);
  return a;
}

inline void require_watertight(const TriangleMesh& m, const char* stage) {
  if (!is_watertight(m)) {
    throw Error(ErrorCode::NotWatertight, stage, "mesh is not watertight");
  }
}

}  // namespace brickstart
