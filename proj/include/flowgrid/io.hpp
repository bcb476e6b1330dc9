#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowgrid/layout.hpp"
#include "flowgrid/metrics.hpp"
#include "flowgrid/render.hpp"
#include "flowgrid/types.hpp"

namespace flowgrid {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

inline double parse_number(const std::string& s, const std::string& what,
                           int line_no) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("line " + std::to_string(line_no) + ": bad " + what + " '" +
                s + "'");
  }
}

}  // namespace detail

// CSV columns: id,x,y,volume,role with role in {origin,destination}.
inline NodeSet parse_nodes(std::istream& in) {
  NodeSet nodes;
  bool have_origin = false;
  std::string line;
  int line_no = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (!header_checked) {
      header_checked = true;
      if (fields.size() >= 5 && fields[0] == "id") continue;  // header row
    }
    if (fields.size() != 5)
      throw Error("line " + std::to_string(line_no) +
                  ": expected 5 fields (id,x,y,volume,role)");
    Point pos{detail::parse_number(fields[1], "x", line_no),
              detail::parse_number(fields[2], "y", line_no)};
    const std::string& role = fields[4];
    if (role == "origin") {
      if (have_origin)
        throw Error("line " + std::to_string(line_no) +
                    ": exactly one origin required");
      have_origin = true;
      nodes.origin = pos;
    } else if (role == "destination") {
      double volume = detail::parse_number(fields[3], "volume", line_no);
      if (!(volume > 0.0))
        throw Error("line " + std::to_string(line_no) +
                    ": volume must be positive");
      nodes.destinations.push_back(Destination{fields[0], pos, volume});
    } else {
      throw Error("line " + std::to_string(line_no) + ": unknown role '" +
                  role + "'");
    }
  }
  if (!have_origin) throw Error("exactly one origin required");
  nodes.validate();
  return nodes;
}

inline NodeSet parse_nodes_text(const std::string& text) {
  std::istringstream ss(text);
  return parse_nodes(ss);
}

namespace detail {

inline Ring parse_ring(const Json& coords, const std::string& where) {
  Ring ring;
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2)
      throw Error(where + ": bad coordinate pair");
    ring.push_back(Point{pt[0].get<double>(), pt[1].get<double>()});
  }
  // Drop a duplicated closing vertex.
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

inline Geometry parse_geometry(const Json& geom, const std::string& where) {
  Geometry g;
  std::string type = geom.at("type").get<std::string>();
  const Json& coords = geom.at("coordinates");
  if (type == "Point") {
    g.kind = GeometryKind::PointGeom;
    g.rings.push_back(Ring{Point{coords[0].get<double>(), coords[1].get<double>()}});
  } else if (type == "LineString") {
    g.kind = GeometryKind::Polyline;
    Ring line;
    for (const auto& pt : coords)
      line.push_back(Point{pt[0].get<double>(), pt[1].get<double>()});
    g.rings.push_back(line);
  } else if (type == "Polygon") {
    g.kind = GeometryKind::Polygon;
    for (const auto& ring : coords) g.rings.push_back(parse_ring(ring, where));
  } else if (type == "MultiPolygon") {
    g.kind = GeometryKind::Polygon;
    for (const auto& poly : coords)
      for (const auto& ring : poly) g.rings.push_back(parse_ring(ring, where));
  } else {
    throw Error(where + ": unsupported geometry type '" + type + "'");
  }
  return g;
}

}  // namespace detail

// GeoJSON FeatureCollection with per-feature property kind: region|obstacle
// and optional delta for regions.
inline RegionSet parse_regions_text(const std::string& text) {
  RegionSet rs;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("GeoJSON parse error: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection")
    throw Error("GeoJSON root must be a FeatureCollection");
  int idx = 0;
  for (const auto& feature : doc.at("features")) {
    std::string where = "feature " + std::to_string(idx++);
    const Json& props = feature.value("properties", Json::object());
    std::string kind = props.value("kind", "");
    Geometry g = detail::parse_geometry(feature.at("geometry"), where);
    if (kind == "obstacle") {
      rs.obstacles.push_back(std::move(g));
    } else if (kind == "region") {
      if (g.kind != GeometryKind::Polygon)
        throw Error(where + ": regions must be polygons");
      WeightedRegion wr;
      wr.shape = std::move(g);
      wr.delta = props.value("delta", 1.0);
      if (!(wr.delta > 0.0)) throw Error(where + ": delta must be positive");
      rs.regions.push_back(std::move(wr));
    } else {
      throw Error(where + ": unknown kind '" + kind + "'");
    }
  }
  return rs;
}

struct RunConfig {
  SearchParams search;
  GridConfig grid;
  RenderConfig render;
  std::vector<double> el_thresholds{20000.0, 40000.0, 70000.0, 100000.0};
  int threads = 1;

  void validate() const {
    if (!(search.omega > 0.0) || search.omega > 1.0)
      throw Error("omega must be in (0, 1]");
    if (!(search.acute_angle_deg > 0.0) || search.acute_angle_deg >= 180.0)
      throw Error("ta must be in (0, 180)");
    if (!(search.min_hang_multiple > 0.0) || !(search.penalty_multiple > 0.0) ||
        !(search.type1_bonus_multiple > 0.0))
      throw Error("length multipliers must be positive");
    if (search.pf_window < 0 || search.rc3_radius < 0)
      throw Error("window sizes must be nonnegative");
    if (threads < 1) throw Error("threads must be >= 1");
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw Error("config key '" + key + "': expected on/off, got '" + v + "'");
}

}  // namespace detail

// key=value settings mirroring the RunConfig fields.
inline void apply_config(RunConfig& cfg, const std::string& key,
                         const std::string& value) {
  auto num = [&] {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw Error("config key '" + key + "': bad number '" + value + "'");
    }
  };
  if (key == "omega") cfg.search.omega = num();
  else if (key == "k") cfg.search.pf_window = static_cast<int>(num());
  else if (key == "k_rc3") cfg.search.rc3_radius = static_cast<int>(num());
  else if (key == "ta") cfg.search.acute_angle_deg = num();
  else if (key == "td") cfg.search.min_hang_multiple = num();
  else if (key == "tf") cfg.search.tie_offset = num();
  else if (key == "pl_pen") cfg.search.penalty_multiple = num();
  else if (key == "g_im") cfg.search.type1_bonus_multiple = num();
  else if (key == "w_max") cfg.render.w_max = num();
  else if (key == "w_min") cfg.render.w_min = num();
  else if (key == "rs") cfg.grid.resolution_override = num();
  else if (key == "extent") {
    if (value == "points") cfg.grid.extent_mode = ExtentMode::PointEnvelope;
    else if (value == "regions") cfg.grid.extent_mode = ExtentMode::RegionEnvelope;
    else throw Error("config key 'extent': expected points|regions");
  }
  else if (key == "st1") cfg.search.st1_acute_penalty = detail::parse_bool(value, key);
  else if (key == "st2") cfg.search.st2_short_hang_penalty = detail::parse_bool(value, key);
  else if (key == "st3") cfg.search.st3_restrict_directions = detail::parse_bool(value, key);
  else if (key == "st4") cfg.search.st4_accumulation_weights = detail::parse_bool(value, key);
  else if (key == "st5") cfg.search.st5_exclude_committed = detail::parse_bool(value, key);
  else if (key == "st6") cfg.search.st6_exclude_destinations = detail::parse_bool(value, key);
  else if (key == "st7") cfg.search.st7_type1_first = detail::parse_bool(value, key);
  else if (key == "invert_draw_order") cfg.render.invert_draw_order = detail::parse_bool(value, key);
  else if (key == "stroke_color") cfg.render.stroke_color = value;
  else if (key == "el_thresholds") {
    cfg.el_thresholds.clear();
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ';'))
      cfg.el_thresholds.push_back(std::stod(item));
  }
  else throw Error("unknown config key '" + key + "'");
}

inline Json metrics_to_json(const MetricsReport& r) {
  Json j;
  j["note"] = "lengths measured on raw (unsmoothed) polylines; Cv uses the "
              "population standard deviation";
  j["tl"] = r.total_length;
  Json el;
  el["values"] = r.hang_lengths;
  el["min"] = r.el_min;
  el["mean"] = r.el_mean;
  el["std"] = r.el_std;
  el["cv_percent"] = r.cv_percent;
  Json counts = Json::object();
  for (const auto& [t, c] : r.el_counts)
    counts["lt_" + std::to_string(static_cast<long long>(t))] = c;
  el["counts"] = counts;
  j["el"] = el;
  j["c_aa"] = r.acute_count;
  j["c_pc"] = r.crossing_count;
  j["c_o"] = r.overlap_count;
  return j;
}

inline Json edges_to_json(const std::vector<RenderedEdge>& edges) {
  Json arr = Json::array();
  for (const auto& re : edges) {
    const EdgeGeometry& e = re.geometry;
    Json j;
    j["kind"] = e.kind == EdgeKind::HangEdge ? "hang" : "non_hang";
    j["ev"] = e.volume;
    j["length"] = e.length();
    j["width"] = e.width;
    j["endpoints"] = Json::array({
        Json::array({e.polyline.front().x, e.polyline.front().y}),
        Json::array({e.polyline.back().x, e.polyline.back().y}),
    });
    arr.push_back(j);
  }
  return arr;
}

inline std::string log_to_jsonl(const std::vector<IterationRecord>& log) {
  std::string out;
  for (const auto& rec : log) {
    Json j;
    j["iteration"] = rec.iteration;
    j["destination"] = rec.destination;
    j["pl"] = rec.penalized_length;
    j["importance"] = rec.importance;
    j["type"] = rec.type == PathType::Type1 ? "type1" : "type2";
    Json pens = Json::array();
    if (rec.acute_penalty) pens.push_back("acute_angle");
    if (rec.short_hang_penalty) pens.push_back("short_hang_edge");
    j["penalties"] = pens;
    j["flow_in"] = Json::array({rec.flow_in.col, rec.flow_in.row});
    j["fallback"] = rec.used_direction_fallback;
    out += j.dump();
    out += "\n";
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace flowgrid
