#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "flowgrid/grid.hpp"
#include "flowgrid/types.hpp"

namespace flowgrid {

inline constexpr double kAngleEps = 1e-9;

struct SearchParams {
  double omega = 0.65;                 // weight on reused downstream length
  int pf_window = 4;                   // k: Chebyshev window for accumulation
  int rc3_radius = 0;                  // exclusion radius around other destinations
  double acute_angle_deg = 120.0;      // T_a
  double min_hang_multiple = std::numbers::sqrt2;  // T_d in units of Rs
  double tie_offset = 0.0;             // T_f; <= 0 means max destination volume
  double penalty_multiple = 20.0;      // PL_pen in units of Rs
  double type1_bonus_multiple = 10000.0;  // G_im in units of Rs

  // Strategy switches; all on by default.
  bool st1_acute_penalty = true;        // penalize acute flow-in angles
  bool st2_short_hang_penalty = true;   // penalize too-short hang edges
  bool st3_restrict_directions = true;  // limit expansion toward the goal
  bool st4_accumulation_weights = true; // accumulation-biased tie-breaking
  bool st5_exclude_committed = true;    // committed cells are walls, not corridors
  bool st6_exclude_destinations = true; // keep paths off other destination cells
  bool st7_type1_first = true;         // origin-direct paths commit first
};

// Mutable tree state shared between searches and commits.
struct CommitState {
  std::vector<std::uint8_t> committed;
  std::vector<std::int8_t> down_dir;       // D8 toward downstream; -1 at origin
  std::vector<double> downstream_len;      // weighted distance to origin
  std::vector<double> through_angle;       // path's own turn angle at the cell

  void init(int ncells, int origin_cell) {
    committed.assign(static_cast<size_t>(ncells), 0);
    down_dir.assign(static_cast<size_t>(ncells), -1);
    downstream_len.assign(static_cast<size_t>(ncells), 0.0);
    through_angle.assign(static_cast<size_t>(ncells), 180.0);
    committed[static_cast<size_t>(origin_cell)] = 1;
    downstream_len[static_cast<size_t>(origin_cell)] = 0.0;
  }
};

// The three D8 codes fanning around the straight ray from one cell toward
// another, ascending code order.
inline std::array<int, 3> search_directions(CellRef from, CellRef toward) {
  if (from == toward) throw Error("search_directions: cells coincide");
  double a = clockwise_angle_deg(toward.col - from.col, toward.row - from.row);
  int z = static_cast<int>(std::floor(a / 45.0)) % 8;
  std::array<int, 3> dirs{(z + 7) % 8, z, (z + 1) % 8};
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// Static per-cell potential accumulation: destination volumes summed over the
// (2k+1)^2 Chebyshev window, clipped at the grid edges.
inline std::vector<double> potential_accumulation(const GridSpace& gs,
                                                  const NodeSet& nodes, int k) {
  if (k < 0) throw Error("potential accumulation window must be >= 0");
  std::vector<double> pf(static_cast<size_t>(gs.size()), 0.0);
  for (size_t i = 0; i < nodes.destinations.size(); ++i) {
    CellRef dc = gs.cell(gs.destination_cells[i]);
    double v = nodes.destinations[i].volume;
    for (int r = std::max(0, dc.row - k); r <= std::min(gs.nrows - 1, dc.row + k); ++r)
      for (int c = std::max(0, dc.col - k); c <= std::min(gs.ncols - 1, dc.col + k); ++c)
        pf[static_cast<size_t>(gs.index(CellRef{c, r}))] += v;
  }
  return pf;
}

// Cost-like direction weight: stepping toward lower accumulation costs more.
inline double direction_weight(double pf_c, double pf_n, double d_cn,
                               double t_f) {
  if (pf_c - pf_n > 0.0) return (pf_c - pf_n + t_f) / d_cn;
  return t_f / d_cn;
}

struct SearchContext {
  const GridSpace& grid;
  const NodeSet& nodes;
  const SearchParams& params;
  const CommitState* state = nullptr;

  std::vector<double> potential;
  std::vector<int> rc3_coverage;  // how many destination windows cover a cell
  double tie_offset = 0.0;        // resolved T_f
  double min_hang_len = 0.0;      // resolved T_d
  double penalty = 0.0;           // resolved PL_pen

  SearchContext(const GridSpace& g, const NodeSet& n, const SearchParams& p,
                const CommitState& s)
      : grid(g), nodes(n), params(p), state(&s) {
    potential = potential_accumulation(g, n, p.pf_window);
    tie_offset = p.tie_offset;
    if (tie_offset <= 0.0) {
      for (const auto& d : n.destinations)
        tie_offset = std::max(tie_offset, d.volume);
    }
    min_hang_len = p.min_hang_multiple * g.resolution;
    penalty = p.penalty_multiple * g.resolution;

    rc3_coverage.assign(static_cast<size_t>(g.size()), 0);
    int k = p.rc3_radius;
    for (int cellidx : g.destination_cells) {
      CellRef dc = g.cell(cellidx);
      for (int r = std::max(0, dc.row - k); r <= std::min(g.nrows - 1, dc.row + k); ++r)
        for (int c = std::max(0, dc.col - k); c <= std::min(g.ncols - 1, dc.col + k); ++c)
          rc3_coverage[static_cast<size_t>(g.index(CellRef{c, r}))] += 1;
    }
  }

  // Blocked for the search routing destination `dest`: outside that
  // destination's own exclusion window, any other window blocks.  The origin
  // and the start cell are never blocked.
  bool blocked(int cell, int dest) const {
    if (cell == grid.origin_cell) return false;
    if (!params.st6_exclude_destinations) return false;
    int own = 0;
    CellRef c = grid.cell(cell);
    CellRef d = grid.cell(grid.destination_cells[static_cast<size_t>(dest)]);
    if (std::max(std::abs(c.col - d.col), std::abs(c.row - d.row)) <=
        params.rc3_radius)
      own = 1;
    return rc3_coverage[static_cast<size_t>(cell)] - own > 0;
  }

  double step_tie(int a, int b) const {
    if (!params.st4_accumulation_weights) return 0.0;
    return direction_weight(potential[static_cast<size_t>(a)],
                            potential[static_cast<size_t>(b)],
                            grid.step_cost(a, b), tie_offset);
  }
};

// Angle between the new path's upstream ray at the flow-in cell and the
// committed downstream direction there.  180 when merging at the origin.
inline double flow_in_angle(const SearchContext& ctx, double up_x, double up_y,
                            int flow_in) {
  int dd = ctx.state->down_dir[static_cast<size_t>(flow_in)];
  if (dd < 0) return 180.0;
  return angle_between_deg(up_x, up_y, kD8Offset[static_cast<size_t>(dd)][0],
                           kD8Offset[static_cast<size_t>(dd)][1]);
}

struct CandidatePath {
  int destination = -1;
  std::vector<int> cells;          // destination cell first, flow-in cell last
  int flow_in = -1;
  double new_length = 0.0;         // weighted length of the new segment
  double downstream_length = 0.0;  // reused length from flow-in to origin
  bool acute_penalty = false;
  bool short_hang_penalty = false;
  double tie_cost = 0.0;
  double penalized_length = 0.0;   // PL
  bool used_direction_fallback = false;
};

namespace detail {

struct TerminalHit {
  double pl = std::numeric_limits<double>::infinity();
  double tie = 0.0;
  int flow_in = -1;
  int pred = -1;
  double sub1 = 0.0;
  bool acute = false;
  bool short_hang = false;

  bool better_than(const TerminalHit& o) const {
    return std::tie(pl, tie, flow_in, pred) <
           std::tie(o.pl, o.tie, o.flow_in, o.pred);
  }
};

inline std::optional<CandidatePath> search_once(const SearchContext& ctx,
                                                int dest, bool restricted) {
  const GridSpace& g = ctx.grid;
  const CommitState& st = *ctx.state;
  const SearchParams& p = ctx.params;
  int start = g.destination_cells[static_cast<size_t>(dest)];
  size_t n = static_cast<size_t>(g.size());

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf), tie(n, inf);
  std::vector<int> pred(n, -1);
  std::vector<std::uint8_t> done(n, 0);

  using Entry = std::tuple<double, double, int>;  // (dist, tie, cell)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  dist[static_cast<size_t>(start)] = 0.0;
  tie[static_cast<size_t>(start)] = 0.0;
  heap.emplace(0.0, 0.0, start);

  TerminalHit best;
  CellRef origin_ref = g.cell(g.origin_cell);

  while (!heap.empty()) {
    auto [d, s, c] = heap.top();
    heap.pop();
    size_t cu = static_cast<size_t>(c);
    if (done[cu] || d > dist[cu] || (d == dist[cu] && s > tie[cu])) continue;
    done[cu] = 1;

    std::array<int, 8> dirs{0, 1, 2, 3, 4, 5, 6, 7};
    int ndirs = 8;
    if (restricted && c != g.origin_cell) {
      auto three = search_directions(g.cell(c), origin_ref);
      std::copy(three.begin(), three.end(), dirs.begin());
      ndirs = 3;
    }

    for (int di = 0; di < ndirs; ++di) {
      int nb = g.neighbor(c, dirs[static_cast<size_t>(di)]);
      if (nb < 0) continue;
      size_t nu = static_cast<size_t>(nb);
      if (g.is_obstacle(nb)) continue;
      if (ctx.blocked(nb, dest) && nb != start) continue;

      if (st.committed[nu]) {
        // Terminal: the new segment may end here and reuse the existing tree.
        double sub1 = d + g.step_cost(c, nb);
        CellRef cc = g.cell(c), nc = g.cell(nb);
        double fa = flow_in_angle(ctx, cc.col - nc.col, cc.row - nc.row, nb);
        bool acute = p.st1_acute_penalty && nb != g.origin_cell &&
                     (fa <= p.acute_angle_deg + kAngleEps ||
                      st.through_angle[nu] <= p.acute_angle_deg + kAngleEps);
        bool hang = p.st2_short_hang_penalty &&
                    sub1 <= ctx.min_hang_len + kAngleEps;
        TerminalHit hit;
        hit.pl = sub1 + p.omega * st.downstream_len[nu] +
                 ctx.penalty * ((acute ? 1 : 0) + (hang ? 1 : 0));
        hit.tie = s + ctx.step_tie(c, nb);
        hit.flow_in = nb;
        hit.pred = c;
        hit.sub1 = sub1;
        hit.acute = acute;
        hit.short_hang = hang;
        if (hit.better_than(best)) best = hit;
        if (p.st5_exclude_committed || nb == g.origin_cell) continue;
      }

      double nd = d + g.step_cost(c, nb);
      double ns = s + ctx.step_tie(c, nb);
      if (nd < dist[nu] || (nd == dist[nu] && ns < tie[nu])) {
        dist[nu] = nd;
        tie[nu] = ns;
        pred[nu] = c;
        heap.emplace(nd, ns, nb);
      }
    }
  }

  if (best.flow_in < 0) return std::nullopt;

  CandidatePath out;
  out.destination = dest;
  out.flow_in = best.flow_in;
  out.new_length = best.sub1;
  out.downstream_length = st.downstream_len[static_cast<size_t>(best.flow_in)];
  out.acute_penalty = best.acute;
  out.short_hang_penalty = best.short_hang;
  out.tie_cost = best.tie;
  out.penalized_length = best.pl;
  for (int c = best.pred; c != -1; c = pred[static_cast<size_t>(c)])
    out.cells.push_back(c);
  std::reverse(out.cells.begin(), out.cells.end());
  out.cells.push_back(best.flow_in);
  return out;
}

}  // namespace detail

// Best penalized-length path from a destination cell into the committed tree.
// With direction restriction active, falls back to the full 8-direction search
// when the restricted one finds no flow-in cell.
inline CandidatePath find_best_path(const SearchContext& ctx, int dest) {
  std::optional<CandidatePath> result;
  if (ctx.params.st3_restrict_directions) {
    result = detail::search_once(ctx, dest, true);
    if (!result) {
      result = detail::search_once(ctx, dest, false);
      if (result) result->used_direction_fallback = true;
    }
  } else {
    result = detail::search_once(ctx, dest, false);
  }
  if (!result)
    throw Error("destination unreachable: '" +
                ctx.nodes.destinations[static_cast<size_t>(dest)].id + "'");
  return *result;
}

}  // namespace flowgrid
