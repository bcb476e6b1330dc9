#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "flowgrid/layout.hpp"

namespace flowgrid {

// Per-cell flow accumulation: sum of the volumes of every destination whose
// tree path passes through the cell.
inline std::vector<double> accumulate(const FlowNetwork& net,
                                      const NodeSet& nodes) {
  const GridSpace& g = net.grid();
  std::vector<double> accum(static_cast<size_t>(g.size()), 0.0);
  for (const auto& p : net.paths()) {
    double v = nodes.destinations[static_cast<size_t>(p.destination)].volume;
    std::set<int> seen;
    for (int cell : p.full_cells)
      if (seen.insert(cell).second) accum[static_cast<size_t>(cell)] += v;
  }
  return accum;
}

enum class EdgeKind { HangEdge, NonHangEdge };

struct EdgeGeometry {
  EdgeKind kind = EdgeKind::NonHangEdge;
  std::vector<int> cells;        // upstream terminal .. downstream terminal
  std::vector<Point> polyline;   // collinear runs collapsed
  double volume = 0.0;           // Ev
  double width = 0.0;            // mm, filled by the renderer
  int upstream_cell = -1;
  int downstream_cell = -1;

  double length() const {
    double len = 0.0;
    for (size_t i = 1; i < polyline.size(); ++i)
      len += distance(polyline[i - 1], polyline[i]);
    return len;
  }
};

// Split the committed tree at junction cells into maximal edges.  Hang edges
// start at destination cells; everything else is a non-hang edge.
inline std::vector<EdgeGeometry> edge_extract(const FlowNetwork& net,
                                              const std::vector<double>& accum) {
  const GridSpace& g = net.grid();
  const CommitState& st = net.state();
  size_t n = static_cast<size_t>(g.size());

  std::vector<int> upstream_count(n, 0);
  for (size_t c = 0; c < n; ++c) {
    if (!st.committed[c] || st.down_dir[c] < 0) continue;
    int nb = g.neighbor(static_cast<int>(c), st.down_dir[c]);
    upstream_count[static_cast<size_t>(nb)] += 1;
  }

  std::vector<std::uint8_t> breakpoint(n, 0);
  breakpoint[static_cast<size_t>(g.origin_cell)] = 1;
  for (int dc : g.destination_cells)
    if (st.committed[static_cast<size_t>(dc)]) breakpoint[static_cast<size_t>(dc)] = 1;
  for (size_t c = 0; c < n; ++c)
    if (st.committed[c] && upstream_count[c] >= 2) breakpoint[c] = 1;

  std::vector<int> starts;
  for (int dc : g.destination_cells)
    if (st.committed[static_cast<size_t>(dc)]) starts.push_back(dc);
  for (size_t c = 0; c < n; ++c)
    if (breakpoint[c] && st.committed[c] && upstream_count[c] >= 2 &&
        static_cast<int>(c) != g.origin_cell &&
        std::find(g.destination_cells.begin(), g.destination_cells.end(),
                  static_cast<int>(c)) == g.destination_cells.end())
      starts.push_back(static_cast<int>(c));

  std::vector<EdgeGeometry> edges;
  for (int b : starts) {
    if (b == g.origin_cell) continue;
    if (st.down_dir[static_cast<size_t>(b)] < 0) continue;
    EdgeGeometry e;
    e.upstream_cell = b;
    e.cells.push_back(b);
    int cur = b;
    do {
      cur = g.neighbor(cur, st.down_dir[static_cast<size_t>(cur)]);
      e.cells.push_back(cur);
    } while (!breakpoint[static_cast<size_t>(cur)]);
    e.downstream_cell = cur;
    e.kind = std::find(g.destination_cells.begin(), g.destination_cells.end(),
                       b) != g.destination_cells.end()
                 ? EdgeKind::HangEdge
                 : EdgeKind::NonHangEdge;
    e.volume = accum[static_cast<size_t>(b)];

    // Collapse collinear runs, keeping endpoints exact.
    e.polyline.push_back(g.cell_center(e.cells.front()));
    for (size_t i = 1; i + 1 < e.cells.size(); ++i) {
      int d_in = g.step_dir(e.cells[i - 1], e.cells[i]);
      int d_out = g.step_dir(e.cells[i], e.cells[i + 1]);
      if (d_in != d_out) e.polyline.push_back(g.cell_center(e.cells[i]));
    }
    if (e.cells.size() > 1) e.polyline.push_back(g.cell_center(e.cells.back()));
    edges.push_back(std::move(e));
  }
  return edges;
}

// Volume-to-width transform: sine-eased between W_min and W_max.
inline double width_for_volume(double fv, double fv_sum, double w_max,
                               double w_min = 0.1) {
  if (!(fv > 0.0) || !(fv_sum > 0.0)) throw Error("width needs positive volumes");
  if (fv > fv_sum * (1.0 + 1e-12))
    throw Error("edge volume exceeds total volume");
  if (!(w_max > w_min) || !(w_min > 0.0))
    throw Error("width bounds must satisfy W_max > W_min > 0");
  double t = std::min(fv / fv_sum, 1.0);
  return std::sin(t * std::numbers::pi / 2.0) * (w_max - w_min) + w_min;
}

struct CurveSegment {
  bool is_quad = false;
  Point p0, ctrl, p1;  // ctrl unused for straight segments

  Point eval(double t) const {
    if (!is_quad)
      return Point{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)};
    double u = 1.0 - t;
    return Point{u * u * p0.x + 2.0 * u * t * ctrl.x + t * t * p1.x,
                 u * u * p0.y + 2.0 * u * t * ctrl.y + t * t * p1.y};
  }
};

// Corner-cutting quadratic smoothing: endpoints exact, interior vertices
// become control points of quadratics between segment midpoints.
inline std::vector<CurveSegment> smooth(const std::vector<Point>& polyline) {
  if (polyline.size() < 2) throw Error("smooth needs at least two points");
  std::vector<CurveSegment> out;
  if (polyline.size() == 2) {
    out.push_back(CurveSegment{false, polyline[0], {}, polyline[1]});
    return out;
  }
  auto mid = [](const Point& a, const Point& b) {
    return Point{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
  };
  Point first_mid = mid(polyline[0], polyline[1]);
  out.push_back(CurveSegment{false, polyline[0], {}, first_mid});
  for (size_t i = 1; i + 1 < polyline.size(); ++i) {
    Point a = mid(polyline[i - 1], polyline[i]);
    Point b = mid(polyline[i], polyline[i + 1]);
    out.push_back(CurveSegment{true, a, polyline[i], b});
  }
  Point last_mid = mid(polyline[polyline.size() - 2], polyline.back());
  out.push_back(CurveSegment{false, last_mid, {}, polyline.back()});
  return out;
}

struct RenderConfig {
  double w_max = 2.0;           // mm
  double w_min = 0.1;           // mm
  double canvas_width_px = 1000.0;
  double page_width_mm = 200.0;
  std::string stroke_color = "#2b6cb0";
  std::string region_color = "#e2e8f0";
  std::string node_color = "#1a202c";
  bool invert_draw_order = false;  // thick atop thin instead
};

struct RenderedEdge {
  EdgeGeometry geometry;
  std::vector<CurveSegment> curve;
};

struct RenderedMap {
  std::vector<RenderedEdge> edges;   // draw order: width descending
  Point origin_marker;
  std::vector<Point> destination_markers;
  double px_per_unit = 1.0;
  double px_per_mm = 1.0;
  Rect extent{0, 0, 0, 0};
};

inline RenderedMap build_rendered_map(const FlowNetwork& net,
                                      const NodeSet& nodes,
                                      const std::vector<EdgeGeometry>& edges,
                                      double total_volume,
                                      const RenderConfig& cfg) {
  RenderedMap map;
  const GridSpace& g = net.grid();
  map.extent = Rect{g.min_corner.x, g.min_corner.y,
                    g.min_corner.x + g.ncols * g.resolution,
                    g.min_corner.y + g.nrows * g.resolution};
  map.px_per_unit = cfg.canvas_width_px / (map.extent.xmax - map.extent.xmin);
  map.px_per_mm = cfg.canvas_width_px / cfg.page_width_mm;

  for (const auto& e : edges) {
    RenderedEdge re;
    re.geometry = e;
    re.geometry.width =
        width_for_volume(e.volume, total_volume, cfg.w_max, cfg.w_min);
    re.curve = smooth(e.polyline);
    map.edges.push_back(std::move(re));
  }
  std::stable_sort(map.edges.begin(), map.edges.end(),
                   [&](const RenderedEdge& a, const RenderedEdge& b) {
                     return cfg.invert_draw_order
                                ? a.geometry.width < b.geometry.width
                                : a.geometry.width > b.geometry.width;
                   });
  map.origin_marker = nodes.origin;
  for (const auto& d : nodes.destinations)
    map.destination_markers.push_back(d.position);
  return map;
}

namespace detail {

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace detail

// Deterministic SVG document: regions beneath, edges width-descending, node
// markers on top; all numbers fixed to six decimals.
inline std::string emit_svg(const RenderedMap& map, const RenderConfig& cfg,
                            const RegionSet& regions = {}) {
  using detail::fmt6;
  double w = (map.extent.xmax - map.extent.xmin) * map.px_per_unit;
  double h = (map.extent.ymax - map.extent.ymin) * map.px_per_unit;
  auto tx = [&](const Point& p) {
    return Point{(p.x - map.extent.xmin) * map.px_per_unit,
                 (map.extent.ymax - p.y) * map.px_per_unit};
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt6(w) +
         "\" height=\"" + fmt6(h) + "\" viewBox=\"0 0 " + fmt6(w) + " " +
         fmt6(h) + "\">\n";

  for (const auto& wr : regions.regions) {
    for (const auto& ring : wr.shape.rings) {
      if (ring.empty()) continue;
      svg += "  <polygon fill=\"" + cfg.region_color + "\" points=\"";
      for (size_t i = 0; i < ring.size(); ++i) {
        Point p = tx(ring[i]);
        if (i) svg += " ";
        svg += fmt6(p.x) + "," + fmt6(p.y);
      }
      svg += "\"/>\n";
    }
  }

  for (const auto& re : map.edges) {
    std::string d;
    for (size_t i = 0; i < re.curve.size(); ++i) {
      const CurveSegment& s = re.curve[i];
      Point p0 = tx(s.p0), p1 = tx(s.p1);
      if (i == 0) d += "M " + fmt6(p0.x) + " " + fmt6(p0.y);
      if (s.is_quad) {
        Point c = tx(s.ctrl);
        d += " Q " + fmt6(c.x) + " " + fmt6(c.y) + " " + fmt6(p1.x) + " " +
             fmt6(p1.y);
      } else {
        d += " L " + fmt6(p1.x) + " " + fmt6(p1.y);
      }
    }
    svg += "  <path d=\"" + d + "\" fill=\"none\" stroke=\"" +
           cfg.stroke_color + "\" stroke-width=\"" +
           fmt6(re.geometry.width * map.px_per_mm) +
           "\" stroke-linecap=\"round\"/>\n";
  }

  auto marker = [&](const Point& p, double r_px, const std::string& fill) {
    Point q = tx(p);
    svg += "  <circle cx=\"" + fmt6(q.x) + "\" cy=\"" + fmt6(q.y) +
           "\" r=\"" + fmt6(r_px) + "\" fill=\"" + fill + "\"/>\n";
  };
  marker(map.origin_marker, 0.4 * map.px_per_mm, cfg.node_color);
  for (const auto& p : map.destination_markers)
    marker(p, 0.25 * map.px_per_mm, cfg.node_color);

  svg += "</svg>\n";
  return svg;
}

}  // namespace flowgrid
