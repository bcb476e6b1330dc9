#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flowgrid/render.hpp"

namespace flowgrid {

struct MetricsReport {
  double total_length = 0.0;           // TL, geometric map units
  std::vector<double> hang_lengths;    // EL, one per hang edge
  double el_min = 0.0;
  double el_mean = 0.0;
  double el_std = 0.0;                 // population standard deviation
  double cv_percent = 0.0;             // Cv = std / mean * 100
  std::vector<std::pair<double, int>> el_counts;  // n(EL < t) per threshold
  int acute_count = 0;                 // C_aa
  int crossing_count = 0;              // C_pc
  int overlap_count = 0;               // C_o
};

// Transversal contacts between distinct edge polylines.  Contacts at a shared
// terminal vertex of both edges (tree junctions) do not count.
inline int crossing_count(const std::vector<EdgeGeometry>& edges) {
  auto key = [](const Point& p) {
    return std::pair<long long, long long>(
        static_cast<long long>(std::llround(p.x * 1e6)),
        static_cast<long long>(std::llround(p.y * 1e6)));
  };
  int total = 0;
  for (size_t i = 0; i < edges.size(); ++i) {
    for (size_t j = i + 1; j < edges.size(); ++j) {
      const auto& pa = edges[i].polyline;
      const auto& pb = edges[j].polyline;
      std::set<std::pair<long long, long long>> shared, contacts;
      for (const Point& ta : {pa.front(), pa.back()})
        for (const Point& tb : {pb.front(), pb.back()})
          if (ta == tb) shared.insert(key(ta));

      for (size_t s = 1; s < pa.size(); ++s) {
        for (size_t t = 1; t < pb.size(); ++t) {
          const Point &a = pa[s - 1], &b = pa[s], &c = pb[t - 1], &d = pb[t];
          if (!segments_intersect(a, b, c, d)) continue;
          if (segments_cross_properly(a, b, c, d)) {
            double den = (b.x - a.x) * (d.y - c.y) - (b.y - a.y) * (d.x - c.x);
            double u = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / den;
            contacts.insert(key(Point{a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)}));
          } else {
            for (const Point& p : {a, b})
              if (on_segment(c, d, p)) contacts.insert(key(p));
            for (const Point& p : {c, d})
              if (on_segment(a, b, p)) contacts.insert(key(p));
          }
        }
      }
      for (const auto& k : shared) contacts.erase(k);
      total += static_cast<int>(contacts.size());
    }
  }
  return total;
}

// Node markers lying on a non-incident edge polyline, within half a cell.
inline int overlap_count(const std::vector<EdgeGeometry>& edges,
                         const NodeSet& nodes, const GridSpace& gs) {
  int count = 0;
  auto node_overlaps = [&](const Point& pos, int cell) {
    for (const auto& e : edges) {
      if (e.upstream_cell == cell || e.downstream_cell == cell) continue;
      for (size_t s = 1; s < e.polyline.size(); ++s) {
        if (point_segment_distance(pos, e.polyline[s - 1], e.polyline[s]) <
            gs.resolution / 2.0)
          return true;
      }
    }
    return false;
  };
  if (node_overlaps(nodes.origin, gs.origin_cell)) ++count;
  for (size_t i = 0; i < nodes.destinations.size(); ++i)
    if (node_overlaps(nodes.destinations[i].position, gs.destination_cells[i]))
      ++count;
  return count;
}

// Junctions where a hang edge meets its downstream continuation edge at an
// angle of at most T_a.
inline int acute_angle_count(const std::vector<EdgeGeometry>& edges,
                             const GridSpace& gs, double t_a_deg) {
  int count = 0;
  for (const auto& he : edges) {
    if (he.kind != EdgeKind::HangEdge) continue;
    int junction = he.downstream_cell;
    if (junction == gs.origin_cell) continue;
    const EdgeGeometry* down = nullptr;
    for (const auto& e : edges)
      if (e.upstream_cell == junction) { down = &e; break; }
    if (!down) continue;
    const Point& j = he.polyline.back();
    const Point& up = he.polyline[he.polyline.size() - 2];
    const Point& dn = down->polyline[1];
    double angle = angle_between_deg(up.x - j.x, up.y - j.y, dn.x - j.x, dn.y - j.y);
    if (angle <= t_a_deg + kAngleEps) ++count;
  }
  return count;
}

inline MetricsReport compute_metrics(const std::vector<EdgeGeometry>& edges,
                                     const NodeSet& nodes, const GridSpace& gs,
                                     const std::vector<double>& el_thresholds,
                                     double t_a_deg) {
  MetricsReport r;
  for (const auto& e : edges) {
    double len = e.length();
    r.total_length += len;
    if (e.kind == EdgeKind::HangEdge) r.hang_lengths.push_back(len);
  }
  if (!r.hang_lengths.empty()) {
    r.el_min = *std::min_element(r.hang_lengths.begin(), r.hang_lengths.end());
    double sum = 0.0;
    for (double v : r.hang_lengths) sum += v;
    r.el_mean = sum / static_cast<double>(r.hang_lengths.size());
    double sq = 0.0;
    for (double v : r.hang_lengths) sq += (v - r.el_mean) * (v - r.el_mean);
    r.el_std = std::sqrt(sq / static_cast<double>(r.hang_lengths.size()));
    r.cv_percent = r.el_mean > 0.0 ? r.el_std / r.el_mean * 100.0 : 0.0;
  }
  for (double t : el_thresholds) {
    int c = static_cast<int>(std::count_if(r.hang_lengths.begin(),
                                           r.hang_lengths.end(),
                                           [&](double v) { return v < t; }));
    r.el_counts.emplace_back(t, c);
  }
  r.acute_count = acute_angle_count(edges, gs, t_a_deg);
  r.crossing_count = crossing_count(edges);
  r.overlap_count = overlap_count(edges, nodes, gs);
  return r;
}

// Independent TL route: sum the geometric downstream step lengths over all
// committed cells.
inline double total_length_from_state(const FlowNetwork& net) {
  const GridSpace& g = net.grid();
  const CommitState& st = net.state();
  double total = 0.0;
  for (int c = 0; c < g.size(); ++c) {
    if (!st.committed[static_cast<size_t>(c)]) continue;
    int dd = st.down_dir[static_cast<size_t>(c)];
    if (dd < 0) continue;
    total += g.step_length(c, g.neighbor(c, dd));
  }
  return total;
}

}  // namespace flowgrid
