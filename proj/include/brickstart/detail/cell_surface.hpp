#pragma once

// Turns the boundary faces of a cell complex (voxels, lathe rings, lattice
// sub-cells) into a watertight indexed mesh.
//
// Faces are given as outward, counter-clockwise polygons over integer point
// keys, each tagged with the cell that owns it. Where two cells touch only
// along an edge, four faces meet at that edge; faces are paired by owning
// cell (6-connectivity) and each pair gets its own midpoint vertex so every
// mesh edge ends up with exactly two triangles. Point copies are split per
// fan of faces around the point, so cells touching at a single corner do
// not share a vertex either.

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/mesh.hpp"
#include "brickstart/vec.hpp"

namespace brickstart::detail {

class CellSurfaceBuilder {
 public:
  using Key = std::uint64_t;

  /// `corners` has 3 or 4 entries in outward counter-clockwise order.
  void add_face(std::uint64_t owner, std::initializer_list<Key> corners) {
    Face f;
    f.owner = owner;
    f.n = static_cast<int>(corners.size());
    int i = 0;
    for (Key k : corners) f.keys[i++] = k;
    faces_.push_back(f);
  }

  std::size_t face_count() const { return faces_.size(); }

  TriangleMesh build(const std::function<Vec3(Key)>& position) const {
    const std::size_t nf = faces_.size();
    if (nf == 0) throw Error(ErrorCode::EmptySolid, "mesh", "no boundary faces");

    // Undirected edge -> incident (face, local edge index).
    struct EdgeRef {
      std::uint32_t face;
      std::uint8_t edge;
    };
    struct EdgeHash {
      std::size_t operator()(const std::pair<Key, Key>& p) const {
        return std::hash<Key>{}(p.first * 0x9E3779B97F4A7C15ull ^ (p.second + 0x632BE59BD9B4E019ull));
      }
    };
    std::unordered_map<std::pair<Key, Key>, std::vector<EdgeRef>, EdgeHash> edges;
    edges.reserve(nf * 4);
    auto edge_id = [](Key a, Key b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
    for (std::size_t f = 0; f < nf; ++f) {
      const Face& face = faces_[f];
      for (int e = 0; e < face.n; ++e) {
        Key a = face.keys[e], b = face.keys[(e + 1) % face.n];
        if (a == b) continue;  // collapsed edge of a triangle written as a quad
        edges[edge_id(a, b)].push_back({static_cast<std::uint32_t>(f), static_cast<std::uint8_t>(e)});
      }
    }

    // Corner slots (face * 4 + corner) are merged across linked faces.
    UnionFind slots(nf * 4);
    // Midpoint vertex per split (face, edge); -1 when not split.
    std::vector<std::array<int, 4>> split(nf, {-1, -1, -1, -1});
    std::vector<Vec3> midpoints;

    auto link = [&](const EdgeRef& r1, const EdgeRef& r2) {
      const Face& f1 = faces_[r1.face];
      const Face& f2 = faces_[r2.face];
      // r1 runs a->b, r2 must run b->a.
      const int a1 = r1.edge, b1 = (r1.edge + 1) % f1.n;
      const int b2 = r2.edge, a2 = (r2.edge + 1) % f2.n;
      if (f1.keys[a1] != f2.keys[a2] || f1.keys[b1] != f2.keys[b2]) {
        throw Error(ErrorCode::InvalidArgument, "mesh", "inconsistent face orientation");
      }
      slots.unite(r1.face * 4u + a1, r2.face * 4u + a2);
      slots.unite(r1.face * 4u + b1, r2.face * 4u + b2);
    };

    std::vector<bool> done(nf * 4, false);
    for (std::size_t f = 0; f < nf; ++f) {
      const Face& face = faces_[f];
      for (int e = 0; e < face.n; ++e) {
        if (done[f * 4 + e]) continue;
        Key a = face.keys[e], b = face.keys[(e + 1) % face.n];
        if (a == b) continue;
        const auto& refs = edges.at(edge_id(a, b));
        for (const auto& r : refs) done[r.face * 4u + r.edge] = true;
        if (refs.size() == 2) {
          link(refs[0], refs[1]);
        } else if (refs.size() == 4) {
          // Two cells touching along this edge only: pair faces by owner.
          std::array<bool, 4> used{};
          for (int i = 0; i < 4; ++i) {
            if (used[i]) continue;
            int j = i + 1;
            while (j < 4 && (used[j] || faces_[refs[j].face].owner != faces_[refs[i].face].owner)) ++j;
            if (j == 4) throw Error(ErrorCode::InvalidArgument, "mesh", "unpaired non-manifold edge");
            used[i] = used[j] = true;
            link(refs[i], refs[j]);
            const int mid = static_cast<int>(midpoints.size());
            midpoints.push_back((position(a) + position(b)) * 0.5);
            split[refs[i].face][refs[i].edge] = mid;
            split[refs[j].face][refs[j].edge] = mid;
          }
        } else {
          throw Error(ErrorCode::InvalidArgument, "mesh",
                      "edge shared by " + std::to_string(refs.size()) + " faces");
        }
      }
    }

    // Vertex numbering in order of first use.
    std::vector<Vec3> vertices;
    std::vector<int> slot_vertex(nf * 4, -1);
    std::vector<int> class_vertex(nf * 4, -1);
    for (std::size_t f = 0; f < nf; ++f) {
      for (int c = 0; c < faces_[f].n; ++c) {
        const std::size_t root = slots.find(f * 4 + c);
        if (class_vertex[root] < 0) {
          class_vertex[root] = static_cast<int>(vertices.size());
          vertices.push_back(position(faces_[f].keys[c]));
        }
        slot_vertex[f * 4 + c] = class_vertex[root];
      }
    }
    const int mid_base = static_cast<int>(vertices.size());
    vertices.insert(vertices.end(), midpoints.begin(), midpoints.end());

    std::vector<Triangle> tris;
    tris.reserve(nf * 2);
    auto tri = [&](int a, int b, int c) {
      tris.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(c)});
    };
    for (std::size_t f = 0; f < nf; ++f) {
      const Face& face = faces_[f];
      // Boundary loop of vertex ids, collapsed corners removed.
      std::vector<int> loop;
      bool has_split = false;
      for (int c = 0; c < face.n; ++c) {
        if (c > 0 && face.keys[c] == face.keys[c - 1]) continue;
        if (c == face.n - 1 && face.keys[c] == face.keys[0]) continue;
        loop.push_back(slot_vertex[f * 4 + c]);
        if (split[f][c] >= 0) {
          loop.push_back(mid_base + split[f][c]);
          has_split = true;
        }
      }
      if (!has_split) {
        for (std::size_t i = 1; i + 1 < loop.size(); ++i) tri(loop[0], loop[i], loop[i + 1]);
        continue;
      }
      Vec3 centre{};
      int distinct = 0;
      for (int c = 0; c < face.n; ++c) {
        if (c > 0 && face.keys[c] == face.keys[c - 1]) continue;
        if (c == face.n - 1 && face.keys[c] == face.keys[0]) continue;
        centre += position(face.keys[c]);
        ++distinct;
      }
      const int centre_id = static_cast<int>(vertices.size());
      vertices.push_back(centre / distinct);
      for (std::size_t i = 0; i < loop.size(); ++i) tri(centre_id, loop[i], loop[(i + 1) % loop.size()]);
    }
    return TriangleMesh(std::move(vertices), std::move(tris));
  }

 private:
  struct Face {
    std::array<Key, 4> keys{};
    int n = 4;
    std::uint64_t owner = 0;
  };
  std::vector<Face> faces_;
};

/// Boundary mesh of an occupancy grid with arbitrary (monotone) cell
/// coordinates along each axis: coords[a] has n[a] + 1 entries.
template <class Occupied>
TriangleMesh grid_boundary_mesh(const std::array<int, 3>& n, const std::array<std::vector<double>, 3>& coords,
                                Occupied&& occupied) {
  const std::uint64_t px = static_cast<std::uint64_t>(n[0]) + 1;
  const std::uint64_t py = static_cast<std::uint64_t>(n[1]) + 1;
  auto key = [&](int i, int j, int k) -> std::uint64_t {
    return static_cast<std::uint64_t>(i) + px * (static_cast<std::uint64_t>(j) + py * static_cast<std::uint64_t>(k));
  };
  auto filled = [&](int i, int j, int k) {
    return i >= 0 && j >= 0 && k >= 0 && i < n[0] && j < n[1] && k < n[2] && occupied(i, j, k);
  };
  CellSurfaceBuilder b;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        if (!occupied(i, j, k)) continue;
        const std::uint64_t owner = key(i, j, k);
        if (!filled(i - 1, j, k))
          b.add_face(owner, {key(i, j, k), key(i, j, k + 1), key(i, j + 1, k + 1), key(i, j + 1, k)});
        if (!filled(i + 1, j, k))
          b.add_face(owner, {key(i + 1, j, k), key(i + 1, j + 1, k), key(i + 1, j + 1, k + 1), key(i + 1, j, k + 1)});
        if (!filled(i, j - 1, k))
          b.add_face(owner, {key(i, j, k), key(i + 1, j, k), key(i + 1, j, k + 1), key(i, j, k + 1)});
        if (!filled(i, j + 1, k))
          b.add_face(owner, {key(i, j + 1, k), key(i, j + 1, k + 1), key(i + 1, j + 1, k + 1), key(i + 1, j + 1, k)});
        if (!filled(i, j, k - 1))
          b.add_face(owner, {key(i, j, k), key(i, j + 1, k), key(i + 1, j + 1, k), key(i + 1, j, k)});
        if (!filled(i, j, k + 1))
          b.add_face(owner, {key(i, j, k + 1), key(i + 1, j, k + 1), key(i + 1, j + 1, k + 1), key(i, j + 1, k + 1)});
      }
    }
  }
  return b.build([&](std::uint64_t kk) {
    const int i = static_cast<int>(kk % px);
    const int j = static_cast<int>((kk / px) % py);
    const int k = static_cast<int>(kk / (px * py));
    return Vec3{coords[0][i], coords[1][j], coords[2][k]};
  });
}

}  // namespace brickstart::detail
