#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace flowgrid {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Angle between two direction vectors, in [0, 180] degrees.
inline double angle_between_deg(double ux, double uy, double vx, double vy) {
  double nu = std::hypot(ux, uy);
  double nv = std::hypot(vx, vy);
  if (nu == 0.0 || nv == 0.0) return 180.0;
  double c = (ux * vx + uy * vy) / (nu * nv);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// Clockwise angle in [0, 360) from the vector (dx, dy) to the +x axis,
// with y growing upward.  East = 0, SE = 45, S = 90, ...
inline double clockwise_angle_deg(double dx, double dy) {
  double a = std::atan2(dy, dx) * 180.0 / std::numbers::pi;  // (-180, 180], ccw
  double cw = std::fmod(360.0 - a, 360.0);
  if (cw < 0.0) cw += 360.0;
  if (cw >= 360.0) cw = 0.0;
  return cw;
}

// Sign of the cross product (b-a) x (c-a): > 0 left turn, < 0 right turn.
inline int orientation(const Point& a, const Point& b, const Point& c) {
  double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

inline bool on_segment(const Point& a, const Point& b, const Point& p) {
  if (orientation(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// True if segments [a,b] and [c,d] intersect at all (including endpoints).
inline bool segments_intersect(const Point& a, const Point& b, const Point& c,
                               const Point& d) {
  int o1 = orientation(a, b, c);
  int o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a);
  int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Proper (transversal) crossing: the segments cross at a single interior
// point of both.
inline bool segments_cross_properly(const Point& a, const Point& b,
                                    const Point& c, const Point& d) {
  int o1 = orientation(a, b, c);
  int o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a);
  int o4 = orientation(c, d, b);
  return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

inline double point_segment_distance(const Point& p, const Point& a,
                                     const Point& b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return distance(p, a);
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, Point{a.x + t * vx, a.y + t * vy});
}

using Ring = std::vector<Point>;

// Even-odd test over one or more rings (holes supported by ring parity).
inline bool point_in_rings(const Point& p, const std::vector<Ring>& rings) {
  bool inside = false;
  for (const auto& ring : rings) {
    size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point& a = ring[i];
      const Point& b = ring[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        double xint = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
        if (p.x < xint) inside = !inside;
      }
    }
  }
  return inside;
}

struct Rect {
  double xmin, ymin, xmax, ymax;

  bool contains(const Point& p) const {
    return xmin <= p.x && p.x <= xmax && ymin <= p.y && p.y <= ymax;
  }
};

inline bool segment_intersects_rect(const Point& a, const Point& b,
                                    const Rect& r) {
  if (r.contains(a) || r.contains(b)) return true;
  Point c0{r.xmin, r.ymin}, c1{r.xmax, r.ymin}, c2{r.xmax, r.ymax},
      c3{r.xmin, r.ymax};
  return segments_intersect(a, b, c0, c1) || segments_intersect(a, b, c1, c2) ||
         segments_intersect(a, b, c2, c3) || segments_intersect(a, b, c3, c0);
}

// Conservative polygon-vs-square test: boundary touch counts.
inline bool rings_intersect_rect(const std::vector<Ring>& rings,
                                 const Rect& r) {
  for (const auto& ring : rings) {
    size_t n = ring.size();
    if (n == 0) continue;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
      if (segment_intersects_rect(ring[j], ring[i], r)) return true;
    }
  }
  // No boundary contact: either the square is fully inside or fully outside.
  Point center{(r.xmin + r.xmax) / 2.0, (r.ymin + r.ymax) / 2.0};
  return point_in_rings(center, rings);
}

}  // namespace flowgrid
