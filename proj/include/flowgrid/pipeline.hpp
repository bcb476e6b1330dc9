#pragma once

#include <string>
#include <vector>

#include "flowgrid/io.hpp"

namespace flowgrid {

struct RunOutput {
  GridSpace grid;
  LayoutResult layout;
  std::vector<double> accumulation;
  std::vector<EdgeGeometry> edges;
  RenderedMap map;
  MetricsReport metrics;
  std::string svg;
  std::string metrics_json;
  std::string edges_json;
  std::string log_jsonl;
};

// Full pipeline: grid build, iterative assignment, accumulation, rendering,
// metrics.  Deterministic for identical inputs and config at any thread count.
inline RunOutput run_pipeline(const NodeSet& nodes, const RegionSet& regions,
                              const RunConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.grid = build_grid(nodes, regions, cfg.grid);
  out.layout = assign_all(out.grid, nodes, cfg.search, cfg.threads);
  out.accumulation = accumulate(out.layout.network, nodes);
  out.edges = edge_extract(out.layout.network, out.accumulation);

  double total = 0.0;
  for (const auto& d : nodes.destinations) total += d.volume;
  out.map = build_rendered_map(out.layout.network, nodes, out.edges, total,
                               cfg.render);
  out.metrics = compute_metrics(out.edges, nodes, out.grid, cfg.el_thresholds,
                                cfg.search.acute_angle_deg);
  out.svg = emit_svg(out.map, cfg.render, regions);
  out.metrics_json = metrics_to_json(out.metrics).dump(2) + "\n";
  out.edges_json = edges_to_json(out.map.edges).dump(2) + "\n";
  out.log_jsonl = log_to_jsonl(out.layout.log);
  return out;
}

}  // namespace flowgrid
