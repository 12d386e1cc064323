#pragma once

// Generators and independent oracles shared by the test suites. Nothing in
// here calls into the code paths it is used to check.

#include <cstdint>
#include <random>
#include <vector>

#include "brickstart/grid.hpp"

namespace bstest {

using brickstart::BrickBitmask;
using brickstart::VoxelSolid;

inline BrickBitmask random_mask(std::mt19937& rng, int cols, int rows, double density) {
  std::bernoulli_distribution fill(density);
  BrickBitmask m(cols, rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.set(c, r, fill(rng));
  return m;
}

inline BrickBitmask random_nonempty_mask(std::mt19937& rng, int max_cols, int max_rows, double density) {
  std::uniform_int_distribution<int> dc(1, max_cols), dr(1, max_rows);
  for (;;) {
    BrickBitmask m = random_mask(rng, dc(rng), dr(rng), density);
    if (!m.empty()) return m;
  }
}

/// Random 4-connected mask grown cell by cell, cropped to its bounding box.
inline BrickBitmask random_connected_mask(std::mt19937& rng, int max_cols, int max_rows) {
  std::uniform_int_distribution<int> dc(1, max_cols), dr(1, max_rows);
  const int cols = dc(rng), rows = dr(rng);
  BrickBitmask m(cols, rows);
  std::uniform_int_distribution<int> pc(0, cols - 1), pr(0, rows - 1);
  std::vector<std::pair<int, int>> cells{{pc(rng), pr(rng)}};
  m.set(cells[0].first, cells[0].second, true);
  const int target = std::max(1, static_cast<int>(cols * rows * std::uniform_real_distribution<double>(0.3, 0.8)(rng)));
  for (int guard = 0; static_cast<int>(cells.size()) < target && guard < 20 * target; ++guard) {
    auto [c, r] = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
    static constexpr int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const auto& d = dirs[std::uniform_int_distribution<int>(0, 3)(rng)];
    const int nc = c + d[0], nr = r + d[1];
    if (!m.in_bounds(nc, nr) || m.at(nc, nr)) continue;
    m.set(nc, nr, true);
    cells.emplace_back(nc, nr);
  }
  return m.cropped();
}

/// Random 6-connected solid grown voxel by voxel.
inline VoxelSolid random_connected_solid(std::mt19937& rng, int n, int voxels,
                                         brickstart::CellDimensions cell = {}) {
  VoxelSolid s(n, n, n, cell);
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::vector<std::array<int, 3>> cells{{coord(rng), coord(rng), coord(rng)}};
  s.set(cells[0][0], cells[0][1], cells[0][2], true);
  for (int guard = 0; static_cast<int>(cells.size()) < voxels && guard < 50 * voxels; ++guard) {
    auto p = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
    const int axis = std::uniform_int_distribution<int>(0, 2)(rng);
    p[axis] += std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    if (!s.in_bounds(p[0], p[1], p[2]) || s.at(p[0], p[1], p[2])) continue;
    s.set(p[0], p[1], p[2], true);
    cells.push_back(p);
  }
  return s;
}

inline VoxelSolid random_solid(std::mt19937& rng, int nx, int ny, int nz, double density,
                               brickstart::CellDimensions cell = {}) {
  std::bernoulli_distribution fill(density);
  VoxelSolid s(nx, ny, nz, cell);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) s.set(x, y, z, fill(rng));
  return s;
}

// --- oracles ---------------------------------------------------------------

/// Recursive flood fill, 4-neighbourhood.
inline int flood_fill_components(const BrickBitmask& m) {
  std::vector<char> seen(static_cast<std::size_t>(m.cols()) * m.rows(), 0);
  auto fill = [&](auto&& self, int c, int r) -> void {
    if (c < 0 || r < 0 || c >= m.cols() || r >= m.rows()) return;
    auto& s = seen[static_cast<std::size_t>(r) * m.cols() + c];
    if (s || !m.at(c, r)) return;
    s = 1;
    self(self, c + 1, r);
    self(self, c - 1, r);
    self(self, c, r + 1);
    self(self, c, r - 1);
  };
  int count = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m.at(c, r) && !seen[static_cast<std::size_t>(r) * m.cols() + c]) {
        ++count;
        fill(fill, c, r);
      }
    }
  }
  return count;
}

/// Count of voxel faces with an occupied voxel on one side and empty
/// space (or the outside) on the other.
inline std::size_t boundary_face_count(const VoxelSolid& s) {
  std::size_t faces = 0;
  for (int z = 0; z < s.nz(); ++z)
    for (int y = 0; y < s.ny(); ++y)
      for (int x = 0; x < s.nx(); ++x) {
        if (!s.at(x, y, z)) continue;
        faces += !s.get(x - 1, y, z);
        faces += !s.get(x + 1, y, z);
        faces += !s.get(x, y - 1, z);
        faces += !s.get(x, y + 1, z);
        faces += !s.get(x, y, z - 1);
        faces += !s.get(x, y, z + 1);
      }
  return faces;
}

}  // namespace bstest
