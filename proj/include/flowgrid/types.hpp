#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "flowgrid/geometry.hpp"

namespace flowgrid {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Destination {
  std::string id;
  Point position;
  double volume = 0.0;  // flow units, > 0
};

// One origin plus the weighted destinations it feeds.
struct NodeSet {
  Point origin;
  std::vector<Destination> destinations;

  void validate() const {
    if (destinations.empty()) throw Error("node set needs at least one destination");
    for (size_t i = 0; i < destinations.size(); ++i) {
      const auto& d = destinations[i];
      if (!(d.volume > 0.0))
        throw Error("destination '" + d.id + "' has nonpositive volume");
      if (d.position == origin)
        throw Error("destination '" + d.id + "' coincides with the origin");
      for (size_t j = i + 1; j < destinations.size(); ++j) {
        if (d.position == destinations[j].position)
          throw Error("destinations '" + d.id + "' and '" +
                      destinations[j].id + "' share a position");
      }
    }
  }
};

enum class GeometryKind { PointGeom, Polyline, Polygon };

struct Geometry {
  GeometryKind kind = GeometryKind::Polygon;
  // Polygon: one or more rings (holes by parity). Polyline: rings[0] open.
  // Point: rings[0][0].
  std::vector<Ring> rings;
};

struct WeightedRegion {
  Geometry shape;       // polygon
  double delta = 1.0;   // traversal weight for cells inside
};

struct RegionSet {
  std::vector<WeightedRegion> regions;
  std::vector<Geometry> obstacles;
};

}  // namespace flowgrid
