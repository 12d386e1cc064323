#pragma once

// Profile -> solid reconstruction: extrude, lathe, triplanar (shadow box),
// and voxel boundary extraction.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "brickstart/detail/cell_surface.hpp"
#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/mesh.hpp"

namespace brickstart {

/// Boundary faces between occupied and empty voxels, outward wound.
inline TriangleMesh solid_to_mesh(const VoxelSolid& solid) {
  if (solid.count() == 0) {
    throw Error(ErrorCode::EmptySolid, "reconstruct", "voxel solid has no occupied voxels");
  }
  const std::array<int, 3> n{solid.nx(), solid.ny(), solid.nz()};
  const std::array<double, 3> step{solid.cell().width_mm, solid.cell().height_mm, solid.cell().depth_mm};
  std::array<std::vector<double>, 3> coords;
  for (int a = 0; a < 3; ++a) {
    coords[a].resize(static_cast<std::size_t>(n[a]) + 1);
    for (int i = 0; i <= n[a]; ++i) coords[a][i] = solid.origin()[a] + i * step[a];
  }
  return detail::grid_boundary_mesh(n, coords, [&](int i, int j, int k) { return solid.at(i, j, k); });
}

// ---------------------------------------------------------------------------

enum class ExtrudeDirection { Positive, Negative };

struct ExtrudeParams {
  /// Exactly one of the two is used; millimetres win when set.
  int depth_cells = 1;
  std::optional<double> depth_mm;
  ExtrudeDirection direction = ExtrudeDirection::Positive;
};

struct LatheParams {
  enum class Axis { LeftEdge, RightEdge };
  Axis axis_side = Axis::LeftEdge;
  int angular_segments = 64;
};

struct Reconstruction {
  TriangleMesh mesh;
  std::vector<Warning> warnings;
};

namespace detail {

/// Cell size along the profile's viewing axis.
inline double normal_cell_mm(const Profile& p) {
  switch (p.side()) {
    case Side::Front: return p.cell().depth_mm;
    case Side::Right: return p.cell().width_mm;
    case Side::Top: return p.cell().height_mm;
  }
  return p.cell().depth_mm;
}

inline double extrude_depth_mm(const Profile& p, const ExtrudeParams& params) {
  if (params.depth_mm) {
    if (!(std::isfinite(*params.depth_mm) && *params.depth_mm > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "reconstruct", "extrusion depth must be positive");
    }
    return *params.depth_mm;
  }
  if (params.depth_cells < 1) {
    throw Error(ErrorCode::InvalidArgument, "reconstruct", "extrusion depth must be at least one cell");
  }
  return params.depth_cells * normal_cell_mm(p);
}

}  // namespace detail

/// The profile swept `layers` cells along its viewing axis, each layer
/// `layer_mm` thick, placed in the shared frame. Negative direction puts
/// the solid behind the profile plane.
inline VoxelSolid profile_solid(const Profile& p, int layers, double layer_mm,
                                ExtrudeDirection direction = ExtrudeDirection::Positive) {
  if (layers < 1 || !(layer_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "reconstruct", "extrusion depth must be positive");
  }
  const BrickBitmask& m = p.mask();
  const CellDimensions& c = p.cell();
  const double total = layers * layer_mm;
  const double shift = direction == ExtrudeDirection::Negative ? -total : 0.0;
  switch (p.side()) {
    case Side::Front: {
      VoxelSolid s(m.cols(), m.rows(), layers, {c.width_mm, layer_mm, c.height_mm}, {0, 0, shift});
      for (int z = 0; z < layers; ++z)
        for (int y = 0; y < m.rows(); ++y)
          for (int x = 0; x < m.cols(); ++x) s.set(x, y, z, m.at(x, m.rows() - 1 - y));
      return s;
    }
    case Side::Right: {
      VoxelSolid s(layers, m.rows(), m.cols(), {layer_mm, c.depth_mm, c.height_mm}, {shift, 0, 0});
      for (int z = 0; z < m.cols(); ++z)
        for (int y = 0; y < m.rows(); ++y)
          for (int x = 0; x < layers; ++x) s.set(x, y, z, m.at(m.cols() - 1 - z, m.rows() - 1 - y));
      return s;
    }
    case Side::Top: {
      VoxelSolid s(m.cols(), layers, m.rows(), {c.width_mm, c.depth_mm, layer_mm}, {0, shift, 0});
      for (int z = 0; z < m.rows(); ++z)
        for (int y = 0; y < layers; ++y)
          for (int x = 0; x < m.cols(); ++x) s.set(x, y, z, m.at(x, z));
      return s;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "reconstruct", "unknown side");
}

/// Voxel counterpart of extrude(): millimetre depths snap to the nearest
/// positive whole number of cell layers.
inline VoxelSolid extrude_solid(const Profile& p, const ExtrudeParams& params) {
  const double cell = detail::normal_cell_mm(p);
  int layers = params.depth_cells;
  if (params.depth_mm) {
    layers = std::max(1, static_cast<int>(std::lround(detail::extrude_depth_mm(p, params) / cell)));
  } else if (layers < 1) {
    throw Error(ErrorCode::InvalidArgument, "reconstruct", "extrusion depth must be at least one cell");
  }
  return profile_solid(p, layers, cell, params.direction);
}

inline Reconstruction extrude(const Profile& p, const ExtrudeParams& params) {
  const double depth = detail::extrude_depth_mm(p, params);
  Reconstruction r{solid_to_mesh(profile_solid(p, 1, depth, params.direction)), {}};
  if (auto w = disconnection_warning(p.mask())) r.warnings.push_back(*w);
  return r;
}

// ---------------------------------------------------------------------------

/// Ratio of an inscribed regular n-gon's area to its circle's.
inline double polygon_area_factor(int n) {
  return n / (2.0 * std::numbers::pi) * std::sin(2.0 * std::numbers::pi / n);
}

/// Revolves the profile a full turn about the vertical line through the
/// chosen edge of the mask grid. Column c (0 = touching the axis) sweeps an
/// annulus between radii c*w and (c+1)*w; circles become regular n-gons.
inline Reconstruction lathe(const Profile& p, const LatheParams& params) {
  const int n = params.angular_segments;
  if (n < 8) {
    throw Error(ErrorCode::InvalidArgument, "reconstruct", "lathe needs at least 8 angular segments");
  }
  const BrickBitmask& mask = p.mask();
  const int cols = mask.cols();
  const int rows = mask.rows();
  const double w = p.col_mm();
  const double h = p.row_mm();
  // filled(c, r): radial column c from the axis, row r from the bottom.
  auto filled = [&](int c, int r) {
    if (c < 0 || r < 0 || c >= cols || r >= rows) return false;
    const int col = params.axis_side == LatheParams::Axis::LeftEdge ? c : cols - 1 - c;
    return mask.at(col, rows - 1 - r);
  };

  const std::uint64_t heights = static_cast<std::uint64_t>(rows) + 1;
  // Point key: ring k (radius k*w), height j, angle s. Ring 0 is the axis.
  auto key = [&](int k, int j, int s) -> std::uint64_t {
    if (k == 0) return static_cast<std::uint64_t>(j);
    s %= n;
    return heights + ((static_cast<std::uint64_t>(k) - 1) * heights + j) * n + s;
  };
  auto owner = [&](int c, int r, int s) -> std::uint64_t {
    return (static_cast<std::uint64_t>(c) * rows + r) * n + s;
  };

  detail::CellSurfaceBuilder b;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!filled(c, r)) continue;
      for (int s = 0; s < n; ++s) {
        const auto o = owner(c, r, s);
        if (!filled(c + 1, r))
          b.add_face(o, {key(c + 1, r, s), key(c + 1, r + 1, s), key(c + 1, r + 1, s + 1), key(c + 1, r, s + 1)});
        if (c > 0 && !filled(c - 1, r))
          b.add_face(o, {key(c, r, s), key(c, r, s + 1), key(c, r + 1, s + 1), key(c, r + 1, s)});
        if (!filled(c, r + 1)) {
          if (c == 0)
            b.add_face(o, {key(0, r + 1, s), key(1, r + 1, s + 1), key(1, r + 1, s)});
          else
            b.add_face(o, {key(c, r + 1, s), key(c, r + 1, s + 1), key(c + 1, r + 1, s + 1), key(c + 1, r + 1, s)});
        }
        if (!filled(c, r - 1)) {
          if (c == 0)
            b.add_face(o, {key(0, r, s), key(1, r, s), key(1, r, s + 1)});
          else
            b.add_face(o, {key(c, r, s), key(c + 1, r, s), key(c + 1, r, s + 1), key(c, r, s + 1)});
        }
      }
    }
  }

  std::vector<double> cosines(n), sines(n);
  for (int s = 0; s < n; ++s) {
    const double t = 2.0 * std::numbers::pi * s / n;
    cosines[s] = std::cos(t);
    sines[s] = std::sin(t);
  }
  Reconstruction r{b.build([&](std::uint64_t k) {
                     if (k < heights) return Vec3{0.0, static_cast<double>(k) * h, 0.0};
                     const std::uint64_t rest = k - heights;
                     const int s = static_cast<int>(rest % n);
                     const std::uint64_t ring_height = rest / n;
                     const int j = static_cast<int>(ring_height % heights);
                     const int ring = static_cast<int>(ring_height / heights) + 1;
                     const double radius = ring * w;
                     return Vec3{radius * cosines[s], j * h, radius * sines[s]};
                   }),
                   {}};
  if (auto w2 = disconnection_warning(p.mask())) r.warnings.push_back(*w2);
  return r;
}

/// Closed-form lathe volume for `p`: sum over cells of pi (2c+1) w^2 h,
/// times polygon_area_factor(n) when n > 0.
inline double lathe_volume(const Profile& p, LatheParams::Axis axis, int n = 0) {
  const BrickBitmask& mask = p.mask();
  double sum = 0.0;
  for (int row = 0; row < mask.rows(); ++row) {
    for (int col = 0; col < mask.cols(); ++col) {
      if (!mask.at(col, row)) continue;
      const int c = axis == LatheParams::Axis::LeftEdge ? col : mask.cols() - 1 - col;
      sum += (2.0 * c + 1.0);
    }
  }
  const double v = std::numbers::pi * p.col_mm() * p.col_mm() * p.row_mm() * sum;
  return n > 0 ? v * polygon_area_factor(n) : v;
}

// ---------------------------------------------------------------------------

/// Intersection of 2-3 orthogonal extrusions:
/// occupancy(x, y, z) = Front(x, y) & Right(z, y) & Top(x, z); a missing
/// view counts as all-filled.
inline VoxelSolid triplanar(const std::vector<Profile>& profiles) {
  if (profiles.size() < 2 || profiles.size() > 3) {
    throw Error(ErrorCode::InvalidArgument, "reconstruct", "triplanar needs two or three profiles");
  }
  const Profile* front = nullptr;
  const Profile* right = nullptr;
  const Profile* top = nullptr;
  for (const auto& p : profiles) {
    const Profile** slot = p.side() == Side::Front ? &front : (p.side() == Side::Right ? &right : &top);
    if (*slot) {
      throw Error(ErrorCode::DuplicateSide, "reconstruct",
                  "duplicate " + std::string(to_string(p.side())) + " profile");
    }
    *slot = &p;
  }

  struct Extent {
    int value = 0;
    const char* source = nullptr;
  };
  auto agree = [](Extent& e, int value, const char* source, const char* axis) {
    if (e.source == nullptr) {
      e = {value, source};
      return;
    }
    if (e.value != value) {
      throw Error(ErrorCode::DimensionMismatch, "reconstruct",
                  std::string("axis ") + axis + ": " + e.source + " = " + std::to_string(e.value) + " but " +
                      source + " = " + std::to_string(value));
    }
  };
  Extent ex, ey, ez;
  if (front) {
    agree(ex, front->mask().cols(), "front.cols", "x");
    agree(ey, front->mask().rows(), "front.rows", "y");
  }
  if (right) {
    agree(ez, right->mask().cols(), "right.cols", "z");
    agree(ey, right->mask().rows(), "right.rows", "y");
  }
  if (top) {
    agree(ex, top->mask().cols(), "top.cols", "x");
    agree(ez, top->mask().rows(), "top.rows", "z");
  }

  // Each physical axis takes its size from a view that spans it.
  CellDimensions cell;
  cell.width_mm = (front ? front : top)->cell().width_mm;
  cell.height_mm = (front ? front : right)->cell().height_mm;
  cell.depth_mm = (right ? right : top)->cell().depth_mm;

  const int nx = ex.value, ny = ey.value, nz = ez.value;
  VoxelSolid solid(nx, ny, nz, cell);
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      const int row = ny - 1 - y;
      if (right && !right->mask().at(nz - 1 - z, row)) continue;
      for (int x = 0; x < nx; ++x) {
        if (front && !front->mask().at(x, row)) continue;
        if (top && !top->mask().at(x, z)) continue;
        solid.set(x, y, z, true);
      }
    }
  }
  return solid;
}

/// Triplanar solid plus its boundary mesh and disconnection diagnostics.
inline Reconstruction triplanar_mesh(const std::vector<Profile>& profiles) {
  const VoxelSolid solid = triplanar(profiles);
  if (solid.count() == 0) {
    throw Error(ErrorCode::EmptySolid, "reconstruct", "profiles do not intersect");
  }
  Reconstruction r{solid_to_mesh(solid), {}};
  for (const auto& p : profiles) {
    if (auto w = disconnection_warning(p.mask())) {
      w->message = std::string(to_string(p.side())) + " " + w->message;
      r.warnings.push_back(*w);
    }
  }
  const int parts = connected_components(solid).count;
  if (parts > 1) {
    r.warnings.push_back({std::string(kWarnDisconnectedParts),
                          "solid has " + std::to_string(parts) + " disconnected parts"});
  }
  return r;
}

}  // namespace brickstart
