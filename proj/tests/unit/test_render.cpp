#include <catch2/catch_amalgamated.hpp>

#include "flowgrid/render.hpp"
#include "support/fixtures.hpp"

using namespace flowgrid;
using Catch::Approx;

namespace {

CandidatePath manual_path(const GridSpace& gs, const std::vector<CellRef>& cells,
                          int dest) {
  CandidatePath c;
  c.destination = dest;
  for (const auto& cr : cells) c.cells.push_back(gs.index(cr));
  c.flow_in = c.cells.back();
  for (size_t i = 1; i < c.cells.size(); ++i)
    c.new_length += gs.step_cost(c.cells[i - 1], c.cells[i]);
  c.penalized_length = c.new_length;
  return c;
}

// A hand-built five-branch tree exercising junctions, destination-cell
// junctions and collinear collapse.  Volumes: d=50 f=100 h=100 i=100 j=180.
struct TreeFixture {
  NodeSet nodes;
  GridSpace grid;
  FlowNetwork net;

  TreeFixture() {
    testing::LatticeSpec spec;
    spec.rs = 10.0;
    spec.origin = CellRef{0, 0};
    spec.destinations = {{"d", CellRef{6, 0}, 50.0},
                         {"f", CellRef{6, 3}, 100.0},
                         {"h", CellRef{8, 5}, 100.0},
                         {"i", CellRef{2, 4}, 100.0},
                         {"j", CellRef{9, 9}, 180.0}};
    nodes = testing::lattice_nodes(spec);
    grid = build_grid(nodes, {}, testing::lattice_grid_config(spec));
    net = FlowNetwork(grid);
    net.incorporate(manual_path(
        grid, {{6, 0}, {5, 0}, {4, 0}, {3, 0}, {2, 0}, {1, 0}, {0, 0}}, 0));
    net.incorporate(manual_path(grid, {{6, 3}, {5, 2}, {4, 1}, {3, 0}}, 1));
    net.incorporate(manual_path(grid, {{8, 5}, {7, 4}, {6, 3}}, 2));
    net.incorporate(
        manual_path(grid, {{2, 4}, {2, 3}, {2, 2}, {2, 1}, {1, 0}}, 3));
    net.incorporate(
        manual_path(grid, {{9, 9}, {8, 8}, {8, 7}, {8, 6}, {8, 5}}, 4));
  }
};

const EdgeGeometry& edge_from(const std::vector<EdgeGeometry>& edges,
                              const GridSpace& gs, CellRef up) {
  for (const auto& e : edges)
    if (e.upstream_cell == gs.index(up)) return e;
  throw Error("no edge with that upstream terminal");
}

double polyline_distance(const Point& p, const std::vector<Point>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < poly.size(); ++i)
    best = std::min(best, point_segment_distance(p, poly[i - 1], poly[i]));
  return best;
}

}  // namespace

TEST_CASE("accumulation over a single path") {
  testing::LatticeSpec spec;
  spec.rs = 10.0;
  spec.origin = CellRef{0, 0};
  spec.destinations = {{"a", CellRef{4, 0}, 70.0}};
  NodeSet nodes = testing::lattice_nodes(spec);
  GridSpace gs = build_grid(nodes, {}, testing::lattice_grid_config(spec));
  FlowNetwork net(gs);
  net.incorporate(manual_path(gs, {{4, 0}, {3, 0}, {2, 0}, {1, 0}, {0, 0}}, 0));
  auto accum = accumulate(net, nodes);
  for (int c = 0; c <= 4; ++c)
    CHECK(accum[static_cast<size_t>(gs.index({c, 0}))] == Approx(70.0));
}

TEST_CASE("branch volumes add downstream") {
  TreeFixture fx;
  auto accum = accumulate(fx.net, fx.nodes);
  auto at = [&](CellRef c) { return accum[static_cast<size_t>(fx.grid.index(c))]; };
  CHECK(at({9, 9}) == Approx(180.0));
  CHECK(at({8, 5}) == Approx(280.0));   // h + j
  CHECK(at({6, 3}) == Approx(380.0));   // f + h + j
  CHECK(at({6, 0}) == Approx(50.0));
  CHECK(at({3, 0}) == Approx(430.0));   // d branch + f branch
  CHECK(at({1, 0}) == Approx(530.0));   // everything
  CHECK(at({0, 0}) == Approx(530.0));
}

TEST_CASE("edge extraction splits at junctions and destinations") {
  TreeFixture fx;
  auto accum = accumulate(fx.net, fx.nodes);
  auto edges = edge_extract(fx.net, accum);

  int hang = 0, nonhang = 0;
  for (const auto& e : edges)
    (e.kind == EdgeKind::HangEdge ? hang : nonhang) += 1;
  CHECK(hang == 5);
  CHECK(nonhang == 2);

  const GridSpace& g = fx.grid;
  // Hang edge from a destination cell that is itself a junction.
  const auto& he_f = edge_from(edges, g, {6, 3});
  CHECK(he_f.kind == EdgeKind::HangEdge);
  CHECK(he_f.downstream_cell == g.index({3, 0}));
  CHECK(he_f.volume == Approx(380.0));
  const auto& he_h = edge_from(edges, g, {8, 5});
  CHECK(he_h.kind == EdgeKind::HangEdge);
  CHECK(he_h.volume == Approx(280.0));

  // Straight edges collapse to two polyline points; the bent branch keeps
  // exactly its turn vertex.
  const auto& he_d = edge_from(edges, g, {6, 0});
  CHECK(he_d.downstream_cell == g.index({3, 0}));
  CHECK(he_d.polyline.size() == 2);
  CHECK(he_d.volume == Approx(50.0));
  const auto& he_i = edge_from(edges, g, {2, 4});
  REQUIRE(he_i.polyline.size() == 3);
  CHECK(he_i.polyline[1] == g.cell_center(CellRef{2, 1}));
  CHECK(he_i.length() == Approx(30.0 + 10.0 * std::numbers::sqrt2));

  const auto& trunk = edge_from(edges, g, {3, 0});
  CHECK(trunk.kind == EdgeKind::NonHangEdge);
  CHECK(trunk.downstream_cell == g.index({1, 0}));
  CHECK(trunk.volume == Approx(430.0));
  const auto& tail = edge_from(edges, g, {1, 0});
  CHECK(tail.downstream_cell == g.origin_cell);
  CHECK(tail.volume == Approx(530.0));

  // Every destination cell heads exactly one hang edge.
  for (int dc : g.destination_cells) {
    int count = 0;
    for (const auto& e : edges)
      if (e.upstream_cell == dc && e.kind == EdgeKind::HangEdge) ++count;
    CHECK(count == 1);
  }
}

TEST_CASE("volume-to-width transform") {
  CHECK(width_for_volume(530.0, 530.0, 2.0) == Approx(2.0));
  CHECK(width_for_volume(1.0, 530.0, 2.0) ==
        Approx(std::sin(1.0 / 530.0 * std::numbers::pi / 2.0) * 1.9 + 0.1));
  CHECK(width_for_volume(1e-9, 530.0, 2.0) == Approx(0.1).margin(1e-6));
  // One third of the total with a 2.1/0.1 band: sin(pi/6) = 1/2.
  CHECK(width_for_volume(100.0, 300.0, 2.1, 0.1) == Approx(1.1));

  CHECK_THROWS_AS(width_for_volume(0.0, 530.0, 2.0), Error);
  CHECK_THROWS_AS(width_for_volume(531.0, 530.0, 2.0), Error);
  CHECK_THROWS_AS(width_for_volume(10.0, 530.0, 0.05), Error);

  // Strictly increasing in the volume share.
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    double w = width_for_volume(i, 100.0, 2.0);
    CHECK(w > prev);
    prev = w;
  }
  CHECK(prev == Approx(2.0));
}

TEST_CASE("smoothing keeps endpoints and collinear lines") {
  std::vector<Point> line{{0, 0}, {10, 0}, {20, 0}};
  auto segs = smooth(line);
  CHECK(segs.front().p0 == line.front());
  CHECK(segs.back().p1 == line.back());
  for (const auto& s : segs)
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      CHECK(s.eval(t).y == Approx(0.0).margin(1e-12));

  // Two points pass straight through.
  auto two = smooth({{3, 4}, {9, 8}});
  REQUIRE(two.size() == 1);
  CHECK_FALSE(two[0].is_quad);

  CHECK_THROWS_AS(smooth({{1, 1}}), Error);
}

TEST_CASE("smoothing cuts corners by a bounded amount") {
  std::vector<Point> corner{{0, 0}, {20, 0}, {20, 20}};
  auto segs = smooth(corner);
  REQUIRE(segs.size() == 3);
  const CurveSegment& q = segs[1];
  REQUIRE(q.is_quad);
  // The quadratic's midpoint is the closed-form average of the two midpoints
  // and the corner control point.
  Point m = q.eval(0.5);
  CHECK(m.x == Approx(17.5));
  CHECK(m.y == Approx(2.5));
  CHECK(distance(m, Point{20, 0}) == Approx(2.5 * std::numbers::sqrt2));

  // Dense sampling stays within one lattice diagonal of the input polyline.
  for (const auto& s : segs)
    for (int i = 0; i <= 32; ++i)
      CHECK(polyline_distance(s.eval(i / 32.0), corner) <=
            10.0 * std::numbers::sqrt2 + 1e-9);
}

TEST_CASE("rendered map orders edges thick to thin") {
  TreeFixture fx;
  auto accum = accumulate(fx.net, fx.nodes);
  auto edges = edge_extract(fx.net, accum);
  RenderConfig cfg;
  RenderedMap map = build_rendered_map(fx.net, fx.nodes, edges, 530.0, cfg);

  REQUIRE(map.edges.size() == edges.size());
  for (size_t i = 1; i < map.edges.size(); ++i)
    CHECK(map.edges[i - 1].geometry.width >= map.edges[i].geometry.width);
  CHECK(map.edges.front().geometry.width == Approx(2.0));  // the full trunk
  CHECK(map.destination_markers.size() == 5);

  RenderConfig inv = cfg;
  inv.invert_draw_order = true;
  RenderedMap rmap = build_rendered_map(fx.net, fx.nodes, edges, 530.0, inv);
  for (size_t i = 1; i < rmap.edges.size(); ++i)
    CHECK(rmap.edges[i - 1].geometry.width <= rmap.edges[i].geometry.width);
}

TEST_CASE("svg output is deterministic and carries the stroke widths") {
  TreeFixture fx;
  auto accum = accumulate(fx.net, fx.nodes);
  auto edges = edge_extract(fx.net, accum);
  RenderConfig cfg;
  RenderedMap map = build_rendered_map(fx.net, fx.nodes, edges, 530.0, cfg);

  std::string a = emit_svg(map, cfg);
  std::string b = emit_svg(build_rendered_map(fx.net, fx.nodes, edges, 530.0, cfg), cfg);
  CHECK(a == b);

  // The thickest stroke is W_max expressed in pixels.
  std::string widest = "stroke-width=\"" + detail::fmt6(2.0 * map.px_per_mm) + "\"";
  CHECK(a.find(widest) != std::string::npos);
  // Thickest edge is drawn first.
  CHECK(a.find(widest) == a.find("stroke-width"));
  CHECK(a.find("<circle") != std::string::npos);
  CHECK(a.rfind("</svg>\n") == a.size() - 7);
}
