#pragma once

// Brick-grid data model: bitmasks, profiles, voxel solids, plus the
// grid-level analyses (connectivity, outlines, extrusion voxelization).
//
// Frame convention used across the library: x right, y up, z toward the
// viewer. Bitmask row 0 is the top row of the photographed view.
//   Front view: column -> x, row -> y (flipped)       camera on +z
//   Right view: column -> z (flipped), row -> y (flipped)   camera on +x
//   Top view:   column -> x, row -> z                  camera on +y

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/vec.hpp"

namespace brickstart {

struct CellDimensions {
  double width_mm = 15.8;
  double depth_mm = 15.8;
  double height_mm = 11.4;

  bool operator==(const CellDimensions&) const = default;

  bool valid() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    return ok(width_mm) && ok(depth_mm) && ok(height_mm);
  }

  void validate() const {
    if (!valid()) {
      throw Error(ErrorCode::InvalidArgument, "grid",
                  "cell dimensions must be positive and finite");
    }
  }
};

class BrickBitmask {
 public:
  BrickBitmask(int cols, int rows) : cols_(cols), rows_(rows) {
    if (cols < 1 || rows < 1) {
      throw Error(ErrorCode::InvalidArgument, "grid", "bitmask needs at least one row and column");
    }
    cells_.assign(static_cast<std::size_t>(cols) * rows, 0);
  }

  BrickBitmask(int cols, int rows, std::vector<std::uint8_t> cells)
      : BrickBitmask(cols, rows) {
    if (cells.size() != cells_.size()) {
      throw Error(ErrorCode::InvalidArgument, "grid", "bitmask cell count does not match rows*cols");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) cells_[i] = cells[i] ? 1 : 0;
  }

  int cols() const { return cols_; }
  int rows() const { return rows_; }

  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < cols_ && row < rows_;
  }
  bool at(int col, int row) const { return cells_[index(col, row)] != 0; }
  /// Out-of-range reads are empty.
  bool get(int col, int row) const { return in_bounds(col, row) && at(col, row); }
  void set(int col, int row, bool filled) { cells_[index(col, row)] = filled ? 1 : 0; }

  const std::vector<std::uint8_t>& cells() const { return cells_; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto c : cells_) n += c;
    return n;
  }
  bool empty() const { return count() == 0; }

  /// Smallest sub-mask containing every filled cell; the whole mask when empty.
  BrickBitmask cropped() const {
    int c0 = cols_, c1 = -1, r0 = rows_, r1 = -1;
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        if (!at(c, r)) continue;
        c0 = std::min(c0, c);
        c1 = std::max(c1, c);
        r0 = std::min(r0, r);
        r1 = std::max(r1, r);
      }
    }
    if (c1 < 0) return *this;
    BrickBitmask out(c1 - c0 + 1, r1 - r0 + 1);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) out.set(c - c0, r - r0, at(c, r));
    return out;
  }

  BrickBitmask mirrored() const {
    BrickBitmask out(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out.set(cols_ - 1 - c, r, at(c, r));
    return out;
  }

  BrickBitmask transposed() const {
    BrickBitmask out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out.set(r, c, at(c, r));
    return out;
  }

  static BrickBitmask filled(int cols, int rows) {
    BrickBitmask out(cols, rows);
    out.cells_.assign(out.cells_.size(), 1);
    return out;
  }

  bool operator==(const BrickBitmask&) const = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  int cols_;
  int rows_;
  std::vector<std::uint8_t> cells_;
};

// ---------------------------------------------------------------------------
// Text format: "<cols> <rows>" then one line per row, '#' filled, '.' empty.

inline std::string to_text(const BrickBitmask& mask) {
  std::string out = std::to_string(mask.cols()) + " " + std::to_string(mask.rows()) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(mask.rows()) * (mask.cols() + 1));
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) out.push_back(mask.at(c, r) ? '#' : '.');
    out.push_back('\n');
  }
  return out;
}

/// Rows are accepted with or without a trailing newline; '\r' before a
/// newline is ignored.
inline BrickBitmask parse_bitmask(std::string_view text) {
  auto fail = [](const std::string& msg) -> BrickBitmask {
    throw Error(ErrorCode::ParseError, "grid", "bitmask: " + msg);
  };
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) return fail("missing header line");

  int cols = 0, rows = 0;
  {
    std::string_view header = lines[0];
    auto sp = header.find(' ');
    if (sp == std::string_view::npos) return fail("header must be '<cols> <rows>'");
    auto a = header.substr(0, sp);
    auto b = header.substr(sp + 1);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), cols);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), rows);
    if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
        r2.ptr != b.data() + b.size()) {
      return fail("header must be '<cols> <rows>'");
    }
    if (cols < 1 || rows < 1) return fail("dimensions must be positive");
  }
  if (static_cast<int>(lines.size()) - 1 != rows) {
    return fail("expected " + std::to_string(rows) + " rows, found " +
                std::to_string(lines.size() - 1));
  }
  BrickBitmask mask(cols, rows);
  for (int r = 0; r < rows; ++r) {
    std::string_view line = lines[static_cast<std::size_t>(r) + 1];
    if (static_cast<int>(line.size()) != cols) {
      return fail("row " + std::to_string(r) + " has " + std::to_string(line.size()) +
                  " cells, expected " + std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) {
      if (line[c] == '#') {
        mask.set(c, r, true);
      } else if (line[c] != '.') {
        return fail("unexpected character at row " + std::to_string(r) + ", column " +
                    std::to_string(c));
      }
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------

enum class Side { Front, Right, Top };

constexpr std::string_view to_string(Side side) {
  switch (side) {
    case Side::Front: return "front";
    case Side::Right: return "right";
    case Side::Top: return "top";
  }
  return "front";
}

inline Side parse_side(std::string_view s) {
  if (s == "front") return Side::Front;
  if (s == "right") return Side::Right;
  if (s == "top") return Side::Top;
  throw Error(ErrorCode::InvalidArgument, "grid", "unknown side '" + std::string(s) + "'");
}

/// A side view: filled mask plus the physical brick cell it was built from.
class Profile {
 public:
  Profile(BrickBitmask mask, Side side, CellDimensions cell = {})
      : mask_(std::move(mask)), side_(side), cell_(cell) {
    cell_.validate();
    if (mask_.empty()) {
      throw Error(ErrorCode::NoModelFound, "profile", "profile mask has no filled cells");
    }
  }

  const BrickBitmask& mask() const { return mask_; }
  Side side() const { return side_; }
  const CellDimensions& cell() const { return cell_; }

  /// Millimetres spanned by one mask column / one mask row for this view.
  double col_mm() const { return side_ == Side::Right ? cell_.depth_mm : cell_.width_mm; }
  double row_mm() const { return side_ == Side::Top ? cell_.depth_mm : cell_.height_mm; }

  bool operator==(const Profile&) const = default;

 private:
  BrickBitmask mask_;
  Side side_;
  CellDimensions cell_;
};

// ---------------------------------------------------------------------------

class VoxelSolid {
 public:
  VoxelSolid(int nx, int ny, int nz, CellDimensions cell = {}, Vec3 origin = {})
      : nx_(nx), ny_(ny), nz_(nz), cell_(cell), origin_(origin) {
    if (nx < 1 || ny < 1 || nz < 1) {
      throw Error(ErrorCode::InvalidArgument, "grid", "voxel solid dimensions must be positive");
    }
    cell_.validate();
    occupancy_.assign(static_cast<std::size_t>(nx) * ny * nz, 0);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  const CellDimensions& cell() const { return cell_; }
  /// World position (mm) of the minimum corner of voxel (0, 0, 0).
  const Vec3& origin() const { return origin_; }
  void set_origin(const Vec3& o) { origin_ = o; }
  void set_cell(const CellDimensions& c) {
    c.validate();
    cell_ = c;
  }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < nx_ && y < ny_ && z < nz_;
  }
  bool at(int x, int y, int z) const { return occupancy_[index(x, y, z)] != 0; }
  bool get(int x, int y, int z) const { return in_bounds(x, y, z) && at(x, y, z); }
  void set(int x, int y, int z, bool v) { occupancy_[index(x, y, z)] = v ? 1 : 0; }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx_) * (y + static_cast<std::size_t>(ny_) * z);
  }

  const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : occupancy_) n += v;
    return n;
  }

  double voxel_volume() const { return cell_.width_mm * cell_.height_mm * cell_.depth_mm; }

  bool operator==(const VoxelSolid&) const = default;

 private:
  int nx_, ny_, nz_;
  CellDimensions cell_;
  Vec3 origin_;
  std::vector<std::uint8_t> occupancy_;
};

// ---------------------------------------------------------------------------
// Connectivity. 4-neighbourhood in 2D, 6-neighbourhood in 3D: bricks that
// only touch at a corner or an edge do not interlock.

struct ComponentLabels {
  std::vector<int> labels;  // -1 for empty cells, row-major
  int count = 0;
};

inline ComponentLabels connected_components(const BrickBitmask& mask) {
  ComponentLabels out;
  out.labels.assign(static_cast<std::size_t>(mask.cols()) * mask.rows(), -1);
  std::deque<std::pair<int, int>> queue;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      std::size_t idx = static_cast<std::size_t>(r) * mask.cols() + c;
      if (!mask.at(c, r) || out.labels[idx] >= 0) continue;
      const int label = out.count++;
      out.labels[idx] = label;
      queue.emplace_back(c, r);
      while (!queue.empty()) {
        auto [cc, rr] = queue.front();
        queue.pop_front();
        constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        for (const auto& d : dirs) {
          int nc = cc + d[0], nr = rr + d[1];
          if (!mask.get(nc, nr)) continue;
          std::size_t nidx = static_cast<std::size_t>(nr) * mask.cols() + nc;
          if (out.labels[nidx] >= 0) continue;
          out.labels[nidx] = label;
          queue.emplace_back(nc, nr);
        }
      }
    }
  }
  return out;
}

inline ComponentLabels connected_components(const VoxelSolid& solid) {
  ComponentLabels out;
  out.labels.assign(solid.occupancy().size(), -1);
  std::vector<std::array<int, 3>> stack;
  for (int z = 0; z < solid.nz(); ++z) {
    for (int y = 0; y < solid.ny(); ++y) {
      for (int x = 0; x < solid.nx(); ++x) {
        if (!solid.at(x, y, z) || out.labels[solid.index(x, y, z)] >= 0) continue;
        const int label = out.count++;
        out.labels[solid.index(x, y, z)] = label;
        stack.push_back({x, y, z});
        while (!stack.empty()) {
          auto p = stack.back();
          stack.pop_back();
          constexpr std::array<std::array<int, 3>, 6> dirs{
              {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
          for (const auto& d : dirs) {
            int qx = p[0] + d[0], qy = p[1] + d[1], qz = p[2] + d[2];
            if (!solid.get(qx, qy, qz)) continue;
            auto qi = solid.index(qx, qy, qz);
            if (out.labels[qi] >= 0) continue;
            out.labels[qi] = label;
            stack.push_back({qx, qy, qz});
          }
        }
      }
    }
  }
  return out;
}

/// Warning for the "completely disconnected parts" fault class, if present.
inline std::optional<Warning> disconnection_warning(const BrickBitmask& mask) {
  int n = connected_components(mask).count;
  if (n < 2) return std::nullopt;
  return Warning{std::string(kWarnDisconnectedParts),
                 "profile has " + std::to_string(n) + " disconnected parts"};
}

// ---------------------------------------------------------------------------
// Outlines

struct GridPoint {
  int x = 0;
  int y = 0;
  bool operator==(const GridPoint&) const = default;
  auto operator<=>(const GridPoint&) const = default;
};

/// Closed axis-aligned polygon in cell units: origin at the mask's
/// bottom-left corner, y up. Outer boundaries are counter-clockwise,
/// holes clockwise. Only corner vertices are kept.
struct Polygon {
  std::vector<GridPoint> vertices;
  bool hole = false;

  long long twice_signed_area() const {
    long long a = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto& p = vertices[i];
      const auto& q = vertices[(i + 1) % vertices.size()];
      a += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
    }
    return a;
  }
};

inline std::vector<Polygon> outline_polygons(const BrickBitmask& mask) {
  const int rows = mask.rows();
  // filled(c, j) with j counted from the bottom.
  auto filled = [&](int c, int j) { return mask.get(c, rows - 1 - j); };

  // Directed boundary edges with the filled cell on the left.
  struct Edge {
    GridPoint from, to;
  };
  std::vector<Edge> edges;
  for (int j = 0; j < rows; ++j) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!filled(c, j)) continue;
      if (!filled(c, j - 1)) edges.push_back({{c, j}, {c + 1, j}});
      if (!filled(c + 1, j)) edges.push_back({{c + 1, j}, {c + 1, j + 1}});
      if (!filled(c, j + 1)) edges.push_back({{c + 1, j + 1}, {c, j + 1}});
      if (!filled(c - 1, j)) edges.push_back({{c, j + 1}, {c, j}});
    }
  }
  std::multimap<GridPoint, std::size_t> outgoing;
  for (std::size_t i = 0; i < edges.size(); ++i) outgoing.emplace(edges[i].from, i);

  // Successor of each edge. At a pinch vertex (two cells touching only at
  // a corner) take the left turn so the two cells end up in separate loops.
  std::vector<std::size_t> next(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    auto [lo, hi] = outgoing.equal_range(e.to);
    auto pick = lo;
    if (std::next(lo) != hi) {
      const int dx = e.to.x - e.from.x, dy = e.to.y - e.from.y;
      for (auto it = lo; it != hi; ++it) {
        const auto& o = edges[it->second];
        if (dx * (o.to.y - o.from.y) - dy * (o.to.x - o.from.x) > 0) {
          pick = it;
          break;
        }
      }
    }
    next[i] = pick->second;
  }

  std::vector<Polygon> out;
  std::vector<bool> used(edges.size(), false);
  for (std::size_t first = 0; first < edges.size(); ++first) {
    if (used[first]) continue;
    std::vector<GridPoint> loop;
    for (std::size_t e = first; !used[e]; e = next[e]) {
      used[e] = true;
      loop.push_back(edges[e].from);
    }

    // Drop collinear intermediate points.
    Polygon poly;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = loop[(i + n - 1) % n];
      const auto& b = loop[i];
      const auto& c = loop[(i + 1) % n];
      const long long turn = static_cast<long long>(b.x - a.x) * (c.y - b.y) -
                             static_cast<long long>(b.y - a.y) * (c.x - b.x);
      if (turn != 0) poly.vertices.push_back(b);
    }
    poly.hole = poly.twice_signed_area() < 0;
    out.push_back(std::move(poly));
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Occupancy (x, y, z) = mask(x, y) in the Front frame for z in [0, depth).
inline VoxelSolid voxelize_extrusion(const BrickBitmask& mask, int depth_cells,
                                     CellDimensions cell = {}) {
  if (depth_cells < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid", "extrusion depth must be at least one cell");
  }
  VoxelSolid solid(mask.cols(), mask.rows(), depth_cells, cell);
  for (int z = 0; z < depth_cells; ++z)
    for (int y = 0; y < mask.rows(); ++y)
      for (int x = 0; x < mask.cols(); ++x)
        solid.set(x, y, z, mask.at(x, mask.rows() - 1 - y));
  return solid;
}

}  // namespace brickstart
