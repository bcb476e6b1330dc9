#pragma once

#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "flowgrid/grid.hpp"
#include "flowgrid/search.hpp"
#include "flowgrid/types.hpp"

namespace flowgrid {

enum class PathType { Type1, Type2 };

// Type 1 paths reuse nothing of the committed tree: they join at the origin.
inline PathType classify_path(const CandidatePath& c, const GridSpace& gs) {
  return c.flow_in == gs.origin_cell ? PathType::Type1 : PathType::Type2;
}

inline double path_importance(const CandidatePath& c, PathType type,
                              double type1_bonus) {
  return c.penalized_length + (type == PathType::Type1 ? type1_bonus : 0.0);
}

struct CommittedPath {
  int destination = -1;
  std::vector<int> cells;       // new segment: destination cell .. flow-in
  std::vector<int> full_cells;  // destination cell .. origin cell
  int flow_in = -1;
  double new_length = 0.0;
  double downstream_length = 0.0;
  PathType type = PathType::Type1;
  bool acute_penalty = false;
  bool short_hang_penalty = false;
  bool used_direction_fallback = false;
  double penalized_length = 0.0;
};

class FlowNetwork {
 public:
  FlowNetwork() = default;
  explicit FlowNetwork(GridSpace g) : grid_(std::move(g)) {
    state_.init(grid_.size(), grid_.origin_cell);
  }

  const GridSpace& grid() const { return grid_; }
  const CommitState& state() const { return state_; }
  const std::vector<CommittedPath>& paths() const { return paths_; }
  bool is_committed(int cell) const {
    return state_.committed[static_cast<size_t>(cell)] != 0;
  }

  // Commit a candidate: new cells gain downstream directions and lengths.
  // With allow_overlap the new segment may cross already-committed cells,
  // which keep their original direction.
  void incorporate(const CandidatePath& c, bool allow_overlap = false) {
    const GridSpace& g = grid_;
    if (c.cells.size() < 2 || c.flow_in != c.cells.back())
      throw Error("malformed candidate path");
    if (!is_committed(c.flow_in))
      throw Error("stale candidate: flow-in cell is not committed");

    size_t m = c.cells.size();
    double len = state_.downstream_len[static_cast<size_t>(c.flow_in)];
    for (size_t i = m - 1; i-- > 0;) {
      int cell = c.cells[i];
      int next = c.cells[i + 1];
      len += g.step_cost(cell, next);
      if (g.is_obstacle(cell)) throw Error("candidate path enters an obstacle cell");
      if (is_committed(cell)) {
        if (!allow_overlap)
          throw Error("stale candidate: cell already committed");
        continue;
      }
      size_t cu = static_cast<size_t>(cell);
      state_.committed[cu] = 1;
      state_.down_dir[cu] = static_cast<std::int8_t>(g.step_dir(cell, next));
      state_.downstream_len[cu] = len;
      if (i > 0) {
        CellRef prev = g.cell(c.cells[i - 1]);
        CellRef cur = g.cell(cell);
        CellRef nxt = g.cell(next);
        state_.through_angle[cu] =
            angle_between_deg(prev.col - cur.col, prev.row - cur.row,
                              nxt.col - cur.col, nxt.row - cur.row);
      }
    }

    CommittedPath cp;
    cp.destination = c.destination;
    cp.cells = c.cells;
    cp.flow_in = c.flow_in;
    cp.new_length = c.new_length;
    cp.downstream_length = c.downstream_length;
    cp.type = classify_path(c, g);
    cp.acute_penalty = c.acute_penalty;
    cp.short_hang_penalty = c.short_hang_penalty;
    cp.used_direction_fallback = c.used_direction_fallback;
    cp.penalized_length = c.penalized_length;

    cp.full_cells = c.cells;
    int cur = c.flow_in;
    while (cur != g.origin_cell) {
      int dd = state_.down_dir[static_cast<size_t>(cur)];
      if (dd < 0) throw Error("committed cell without downstream direction");
      cur = g.neighbor(cur, dd);
      if (cur < 0) throw Error("downstream chain leaves the grid");
      cp.full_cells.push_back(cur);
    }
    paths_.push_back(cp);
  }

 private:
  GridSpace grid_;
  CommitState state_;
  std::vector<CommittedPath> paths_;
};

struct IterationRecord {
  int iteration = 0;
  std::string destination;
  double penalized_length = 0.0;
  double importance = 0.0;
  PathType type = PathType::Type1;
  bool acute_penalty = false;
  bool short_hang_penalty = false;
  bool used_direction_fallback = false;
  CellRef flow_in;
};

struct LayoutResult {
  FlowNetwork network;
  std::vector<IterationRecord> log;
};

// The outer loop: at each iteration search every remaining destination
// against the current tree and commit the most important candidate.
inline LayoutResult assign_all(const GridSpace& gs, const NodeSet& nodes,
                               const SearchParams& params, int threads = 1) {
  LayoutResult result{FlowNetwork(gs), {}};
  FlowNetwork& net = result.network;
  SearchContext ctx(gs, nodes, params, net.state());
  double type1_bonus =
      params.st7_type1_first ? params.type1_bonus_multiple * gs.resolution : 0.0;

  std::vector<int> remaining(nodes.destinations.size());
  for (size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<int>(i);

  int iteration = 0;
  while (!remaining.empty()) {
    size_t nrem = remaining.size();
    std::vector<std::optional<CandidatePath>> candidates(nrem);
    std::vector<std::exception_ptr> errors(nrem);

    auto worker = [&](size_t lo, size_t hi) {
      for (size_t i = lo; i < hi; ++i) {
        try {
          candidates[i] = find_best_path(ctx, remaining[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1 || nrem == 1) {
      worker(0, nrem);
    } else {
      std::vector<std::thread> pool;
      size_t chunk = (nrem + static_cast<size_t>(nthreads) - 1) /
                     static_cast<size_t>(nthreads);
      for (size_t lo = 0; lo < nrem; lo += chunk)
        pool.emplace_back(worker, lo, std::min(nrem, lo + chunk));
      for (auto& t : pool) t.join();
    }
    for (size_t i = 0; i < nrem; ++i)
      if (errors[i]) std::rethrow_exception(errors[i]);

    // Largest importance wins; ties: larger PL, then lexicographic id.
    size_t pick = 0;
    double pick_imp = -1.0, pick_pl = -1.0;
    for (size_t i = 0; i < nrem; ++i) {
      const CandidatePath& c = *candidates[i];
      double imp = path_importance(c, classify_path(c, gs), type1_bonus);
      const std::string& id =
          nodes.destinations[static_cast<size_t>(remaining[i])].id;
      const std::string& pick_id =
          nodes.destinations[static_cast<size_t>(remaining[pick])].id;
      bool better = imp > pick_imp ||
                    (imp == pick_imp && c.penalized_length > pick_pl) ||
                    (imp == pick_imp && c.penalized_length == pick_pl &&
                     id < pick_id);
      if (i == 0 || better) {
        pick = i;
        pick_imp = imp;
        pick_pl = c.penalized_length;
      }
    }

    const CandidatePath& chosen = *candidates[pick];
    net.incorporate(chosen, !params.st5_exclude_committed);

    IterationRecord rec;
    rec.iteration = iteration++;
    rec.destination =
        nodes.destinations[static_cast<size_t>(chosen.destination)].id;
    rec.penalized_length = chosen.penalized_length;
    rec.importance = pick_imp;
    rec.type = classify_path(chosen, gs);
    rec.acute_penalty = chosen.acute_penalty;
    rec.short_hang_penalty = chosen.short_hang_penalty;
    rec.used_direction_fallback = chosen.used_direction_fallback;
    rec.flow_in = gs.cell(chosen.flow_in);
    result.log.push_back(rec);

    remaining.erase(remaining.begin() + static_cast<long>(pick));
  }
  return result;
}

}  // namespace flowgrid
