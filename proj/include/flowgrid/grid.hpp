#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "flowgrid/geometry.hpp"
#include "flowgrid/types.hpp"

namespace flowgrid {

// D8 codes: 0 = East, increasing clockwise in 45-degree steps
// (1 = SE, 2 = S, 3 = SW, 4 = W, 5 = NW, 6 = N, 7 = NE).
// Offsets are (dcol, drow) with row 0 at the bottom edge (y grows with row).
inline constexpr std::array<std::array<int, 2>, 8> kD8Offset{{
    {{1, 0}}, {{1, -1}}, {{0, -1}}, {{-1, -1}},
    {{-1, 0}}, {{-1, 1}}, {{0, 1}}, {{1, 1}},
}};

enum class CellKind : std::uint8_t { Normal, Obstacle };

struct CellRef {
  int col = 0;
  int row = 0;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

enum class ExtentMode { PointEnvelope, RegionEnvelope };

struct GridConfig {
  ExtentMode extent_mode = ExtentMode::PointEnvelope;
  std::optional<double> resolution_override;
};

// Mean of the smallest ceil(5% * P) pairwise distances over all point pairs,
// divided by 4.  At least one pair is always used.
inline double compute_resolution(const NodeSet& nodes) {
  std::vector<Point> pts;
  pts.push_back(nodes.origin);
  for (const auto& d : nodes.destinations) pts.push_back(d.position);
  if (pts.size() < 2) throw Error("resolution needs at least two points");

  std::vector<double> dists;
  dists.reserve(pts.size() * (pts.size() - 1) / 2);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      dists.push_back(distance(pts[i], pts[j]));

  size_t take = static_cast<size_t>(std::ceil(0.05 * static_cast<double>(dists.size())));
  if (take < 1) take = 1;
  std::partial_sort(dists.begin(), dists.begin() + take, dists.end());
  double sum = std::accumulate(dists.begin(), dists.begin() + take, 0.0);
  double rs = sum / static_cast<double>(take) / 4.0;
  if (!(rs > 0.0)) throw Error("duplicate input points: resolution would be zero");
  return rs;
}

class GridSpace {
 public:
  double resolution = 0.0;   // Rs, map units per cell
  Point min_corner;          // lower-left corner of the gridded extent
  int ncols = 0;
  int nrows = 0;
  std::vector<CellKind> kinds;     // ncols * nrows, row-major
  std::vector<double> weights;     // per-cell traversal weight (delta)
  int origin_cell = -1;            // flat index
  std::vector<int> destination_cells;  // flat index per NodeSet destination

  int size() const { return ncols * nrows; }
  int index(CellRef c) const { return c.row * ncols + c.col; }
  CellRef cell(int idx) const { return CellRef{idx % ncols, idx / ncols}; }
  bool in_bounds(CellRef c) const {
    return c.col >= 0 && c.col < ncols && c.row >= 0 && c.row < nrows;
  }
  bool is_obstacle(int idx) const { return kinds[idx] == CellKind::Obstacle; }

  Point cell_center(CellRef c) const {
    if (!in_bounds(c)) throw Error("cell out of bounds");
    return Point{min_corner.x + (c.col + 0.5) * resolution,
                 min_corner.y + (c.row + 0.5) * resolution};
  }
  Point cell_center(int idx) const { return cell_center(cell(idx)); }

  // Boundary points resolve to the lower-index cell.
  CellRef locate_cell(const Point& p) const {
    double tx = (p.x - min_corner.x) / resolution;
    double ty = (p.y - min_corner.y) / resolution;
    if (tx < 0.0 || ty < 0.0 || tx > ncols || ty > nrows)
      throw Error("point outside grid extent");
    int col = static_cast<int>(std::ceil(tx)) - 1;
    int row = static_cast<int>(std::ceil(ty)) - 1;
    if (col < 0) col = 0;
    if (row < 0) row = 0;
    return CellRef{col, row};
  }

  Rect cell_rect(CellRef c) const {
    return Rect{min_corner.x + c.col * resolution,
                min_corner.y + c.row * resolution,
                min_corner.x + (c.col + 1) * resolution,
                min_corner.y + (c.row + 1) * resolution};
  }

  // Weighted distance between 8-neighbors: half a cell at each cell's weight,
  // times sqrt(2) on diagonals.
  double step_cost(int a, int b) const {
    CellRef ca = cell(a), cb = cell(b);
    int dc = std::abs(ca.col - cb.col), dr = std::abs(ca.row - cb.row);
    if (dc > 1 || dr > 1 || (dc == 0 && dr == 0))
      throw Error("step_cost requires 8-adjacent cells");
    double base = 0.5 * resolution * weights[a] + 0.5 * resolution * weights[b];
    return (dc == 1 && dr == 1) ? std::numbers::sqrt2 * base : base;
  }

  // Unweighted center-to-center distance for the same step.
  double step_length(int a, int b) const {
    CellRef ca = cell(a), cb = cell(b);
    int dc = std::abs(ca.col - cb.col), dr = std::abs(ca.row - cb.row);
    if (dc > 1 || dr > 1 || (dc == 0 && dr == 0))
      throw Error("step_length requires 8-adjacent cells");
    return (dc == 1 && dr == 1) ? std::numbers::sqrt2 * resolution : resolution;
  }

  // D8 code of the step from a to its 8-neighbor b.
  int step_dir(int a, int b) const {
    CellRef ca = cell(a), cb = cell(b);
    int dc = cb.col - ca.col, dr = cb.row - ca.row;
    for (int d = 0; d < 8; ++d)
      if (kD8Offset[d][0] == dc && kD8Offset[d][1] == dr) return d;
    throw Error("cells are not 8-adjacent");
  }

  int neighbor(int idx, int dir) const {
    CellRef c = cell(idx);
    CellRef n{c.col + kD8Offset[dir][0], c.row + kD8Offset[dir][1]};
    return in_bounds(n) ? index(n) : -1;
  }
};

inline bool geometry_intersects_rect(const Geometry& g, const Rect& r) {
  switch (g.kind) {
    case GeometryKind::PointGeom:
      return !g.rings.empty() && !g.rings[0].empty() && r.contains(g.rings[0][0]);
    case GeometryKind::Polyline: {
      if (g.rings.empty()) return false;
      const Ring& line = g.rings[0];
      if (line.size() == 1) return r.contains(line[0]);
      for (size_t i = 1; i < line.size(); ++i)
        if (segment_intersects_rect(line[i - 1], line[i], r)) return true;
      return false;
    }
    case GeometryKind::Polygon:
      return rings_intersect_rect(g.rings, r);
  }
  return false;
}

inline GridSpace build_grid(const NodeSet& nodes, const RegionSet& regions,
                            const GridConfig& cfg) {
  nodes.validate();
  GridSpace gs;
  gs.resolution = cfg.resolution_override ? *cfg.resolution_override
                                          : compute_resolution(nodes);
  double rs = gs.resolution;

  double xmin, ymin, xmax, ymax;
  if (cfg.extent_mode == ExtentMode::PointEnvelope) {
    xmin = xmax = nodes.origin.x;
    ymin = ymax = nodes.origin.y;
    for (const auto& d : nodes.destinations) {
      xmin = std::min(xmin, d.position.x);
      xmax = std::max(xmax, d.position.x);
      ymin = std::min(ymin, d.position.y);
      ymax = std::max(ymax, d.position.y);
    }
    // Half-cell pad so no input point lies on the grid boundary.
    xmin -= rs / 2.0;
    ymin -= rs / 2.0;
    xmax += rs / 2.0;
    ymax += rs / 2.0;
  } else {
    bool seen = false;
    xmin = ymin = xmax = ymax = 0.0;
    auto grow = [&](const Point& p) {
      if (!seen) {
        xmin = xmax = p.x;
        ymin = ymax = p.y;
        seen = true;
      } else {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
      }
    };
    for (const auto& wr : regions.regions)
      for (const auto& ring : wr.shape.rings)
        for (const auto& p : ring) grow(p);
    for (const auto& ob : regions.obstacles)
      for (const auto& ring : ob.rings)
        for (const auto& p : ring) grow(p);
    if (!seen) throw Error("region envelope requested but no regions given");
  }

  gs.min_corner = Point{xmin, ymin};
  gs.ncols = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / rs - 1e-9)));
  gs.nrows = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / rs - 1e-9)));
  gs.kinds.assign(static_cast<size_t>(gs.size()), CellKind::Normal);
  gs.weights.assign(static_cast<size_t>(gs.size()), 1.0);

  for (int r = 0; r < gs.nrows; ++r) {
    for (int c = 0; c < gs.ncols; ++c) {
      CellRef cr{c, r};
      int idx = gs.index(cr);
      Rect rect = gs.cell_rect(cr);
      for (const auto& ob : regions.obstacles) {
        if (geometry_intersects_rect(ob, rect)) {
          gs.kinds[idx] = CellKind::Obstacle;
          break;
        }
      }
      if (gs.kinds[idx] == CellKind::Obstacle) continue;
      Point center = gs.cell_center(cr);
      for (const auto& wr : regions.regions) {
        if (point_in_rings(center, wr.shape.rings)) {
          gs.weights[idx] = wr.delta;
          break;
        }
      }
    }
  }

  auto place = [&](const Point& p, const std::string& label) -> int {
    CellRef c = gs.locate_cell(p);
    int idx = gs.index(c);
    if (gs.kinds[idx] == CellKind::Obstacle)
      throw Error(label + " falls inside an obstacle cell");
    return idx;
  };
  gs.origin_cell = place(nodes.origin, "origin");
  gs.destination_cells.reserve(nodes.destinations.size());
  for (const auto& d : nodes.destinations)
    gs.destination_cells.push_back(place(d.position, "destination '" + d.id + "'"));

  std::vector<int> taken = gs.destination_cells;
  taken.push_back(gs.origin_cell);
  std::sort(taken.begin(), taken.end());
  if (std::adjacent_find(taken.begin(), taken.end()) != taken.end())
    throw Error("resolution too coarse: two input points map to one cell");

  return gs;
}

}  // namespace flowgrid
