#pragma once

// Deterministic test fixtures.  All randomness lives here, in the generator,
// never in the library.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "flowgrid/grid.hpp"
#include "flowgrid/types.hpp"

namespace flowgrid::testing {

struct LatticeSpec {
  double rs = 1000.0;
  CellRef origin;
  std::vector<std::tuple<std::string, CellRef, double>> destinations;
};

// Place every node at the center of a lattice cell; with the half-cell pad of
// point-envelope mode this maps cells one-to-one onto grid cells.
inline NodeSet lattice_nodes(const LatticeSpec& spec) {
  NodeSet nodes;
  auto at = [&](CellRef c) {
    return Point{(c.col + 0.5) * spec.rs, (c.row + 0.5) * spec.rs};
  };
  nodes.origin = at(spec.origin);
  for (const auto& [id, cell, vol] : spec.destinations)
    nodes.destinations.push_back(Destination{id, at(cell), vol});
  return nodes;
}

inline GridConfig lattice_grid_config(const LatticeSpec& spec) {
  GridConfig cfg;
  cfg.extent_mode = ExtentMode::PointEnvelope;
  cfg.resolution_override = spec.rs;
  return cfg;
}

// Random lattice fixture: n x n cells, destinations at distinct cells with the
// two far corners always occupied so the grid spans the full n x n extent.
inline LatticeSpec random_fixture(unsigned seed, int n, int ndest,
                                  double rs = 1000.0) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::uniform_int_distribution<int> vol(10, 500);

  LatticeSpec spec;
  spec.rs = rs;
  spec.origin = CellRef{n / 2, n / 2};
  std::set<std::pair<int, int>> used{{spec.origin.col, spec.origin.row}};

  std::vector<CellRef> cells;
  cells.push_back(CellRef{0, 0});
  used.insert({0, 0});
  cells.push_back(CellRef{n - 1, n - 1});
  used.insert({n - 1, n - 1});
  while (static_cast<int>(cells.size()) < ndest) {
    CellRef c{coord(rng), coord(rng)};
    if (used.insert({c.col, c.row}).second) cells.push_back(c);
  }
  for (int i = 0; i < ndest; ++i) {
    std::string id = "d" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    spec.destinations.emplace_back(id, cells[static_cast<size_t>(i)],
                                   static_cast<double>(vol(rng)));
  }
  return spec;
}

// The standard battery used by the acceptance suite.
inline std::vector<LatticeSpec> fixture_battery() {
  std::vector<LatticeSpec> out;
  unsigned seed = 1;
  for (int i = 0; i < 25; ++i) {
    int n = 20 + (i * 40) / 24;          // 20 .. 60
    int ndest = 3 + (i * 13) % 13;       // 3 .. 15
    out.push_back(random_fixture(seed++, n, ndest));
  }
  return out;
}

}  // namespace flowgrid::testing
