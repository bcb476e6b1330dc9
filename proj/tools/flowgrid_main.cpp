#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowgrid/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"flowgrid: one-to-many flow map layout on a raster grid"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "build a flow map from node data");
  std::string nodes_path, regions_path, out_path, metrics_path, log_path;
  std::vector<std::string> config_pairs;
  int threads = 1;
  run->add_option("--nodes", nodes_path, "node CSV (id,x,y,volume,role)")
      ->required();
  run->add_option("--regions", regions_path,
                  "GeoJSON FeatureCollection of regions/obstacles");
  run->add_option("--config", config_pairs, "key=value settings")
      ->take_all();
  run->add_option("--out", out_path, "output SVG path")->required();
  run->add_option("--metrics", metrics_path, "metrics JSON path")->required();
  run->add_option("--log", log_path, "run log (JSON lines) path");
  run->add_option("--threads", threads, "parallel candidate searches")
      ->default_val(1);

  CLI11_PARSE(app, argc, argv);

  try {
    flowgrid::RunConfig cfg;
    cfg.threads = threads;
    for (const auto& pair : config_pairs) {
      auto eq = pair.find('=');
      if (eq == std::string::npos)
        throw flowgrid::Error("config option must be key=value: '" + pair + "'");
      flowgrid::apply_config(cfg, pair.substr(0, eq), pair.substr(eq + 1));
    }

    flowgrid::NodeSet nodes =
        flowgrid::parse_nodes_text(flowgrid::read_file(nodes_path));
    flowgrid::RegionSet regions;
    if (!regions_path.empty())
      regions = flowgrid::parse_regions_text(flowgrid::read_file(regions_path));

    flowgrid::RunOutput out = flowgrid::run_pipeline(nodes, regions, cfg);

    flowgrid::write_file(out_path, out.svg);
    flowgrid::write_file(out_path + ".edges.json", out.edges_json);
    flowgrid::write_file(metrics_path, out.metrics_json);
    if (!log_path.empty()) flowgrid::write_file(log_path, out.log_jsonl);

    int fallbacks = 0;
    for (const auto& rec : out.layout.log)
      if (rec.used_direction_fallback) ++fallbacks;
    std::cerr << "routed " << out.layout.log.size() << " destinations, "
              << out.map.edges.size() << " edges";
    if (fallbacks > 0)
      std::cerr << " (" << fallbacks << " direction-restriction fallbacks)";
    std::cerr << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
