#include <doctest.h>

#include <functional>

#include "loramesh/planner.hpp"
#include "loramesh/rng.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/simulator.hpp"

using namespace loramesh;

namespace {
// GW0 - 1 - 2 - GW9 line, plus 1 - 3 spur
GlobalGraph line() {
  GlobalGraph g;
  g.add_vertex(0, true);
  g.add_vertex(9, true);
  for (NodeId v : {1, 2, 3}) g.add_vertex(v);
  g.add_edge(0, 1, 40);
  g.add_edge(1, 2, 50);
  g.add_edge(2, 9, 45);
  g.add_edge(1, 3, 30);
  return g;
}
}  // namespace

TEST_CASE("multi-gateway distance values and upstreams") {
  GlobalGraph g = line();
  plan(g);
  CHECK(g.vertices[1].distance_value == 40);
  CHECK(g.vertices[2].distance_value == 45);
  CHECK(g.vertices[3].distance_value == 70);
  CHECK(g.vertices[1].upstream == 0);
  CHECK(g.vertices[2].upstream == 9);
  CHECK(g.vertices[3].upstream == 1);
  CHECK(g.vertices[2].nearest_gateway == 9);
  CHECK(subgraph_members(g, 0) == std::set<NodeId>{0, 1, 3});
}

TEST_CASE("equal distances resolve to the lower gateway") {
  GlobalGraph g;
  g.add_vertex(0, true);
  g.add_vertex(5, true);
  g.add_vertex(2);
  g.add_edge(0, 2, 30);
  g.add_edge(5, 2, 30);
  plan(g);
  CHECK(g.vertices[2].nearest_gateway == 0);
  CHECK(g.vertices[2].upstream == 0);
}

TEST_CASE("aggregation averages two-sided observations and flags one-sided ones") {
  std::vector<wire::NeighborReport> r = {
      {1, 0, {{0, 40.0}, {2, 60.0}}},
      {2, 0, {{1, 50.0}}},
      {3, 0, {{1, 30.0}}},
  };
  GlobalGraph g = aggregate({0}, r);
  CHECK(g.edges.at({1, 2}).weight_m == doctest::Approx(55.0));
  CHECK(g.edges.at({1, 2}).symmetric);
  CHECK_FALSE(g.edges.at({0, 1}).symmetric);
  CHECK_FALSE(g.warnings.empty());
  CHECK_THROWS_AS(aggregate({}, r), ConfigError);
}

TEST_CASE("disconnected repeaters are reported unreachable") {
  GlobalGraph g;
  g.add_vertex(0, true);
  g.add_vertex(1);
  g.add_vertex(7);
  g.add_edge(0, 1, 10);
  plan(g);
  CHECK(g.unreachable() == std::vector<NodeId>{7});
  CHECK(g.vertices[7].upstream == kNoNode);
}

TEST_CASE("star subgraph needs no repeater forwarders") {
  GlobalGraph g;
  g.add_vertex(0, true);
  for (NodeId v = 1; v <= 5; ++v) {
    g.add_vertex(v);
    g.add_edge(0, v, 10.0 * v);
  }
  plan(g);
  for (NodeId v = 1; v <= 5; ++v) CHECK(g.vertices[v].downstream.empty());
  CHECK(downlink_coverage(g, 0).size() == 6);
}

TEST_CASE("downlink sets cover every subgraph member on random graphs") {
  RngStream rng(3, 0, StreamPurpose::Traffic);
  for (int trial = 0; trial < 300; ++trial) {
    GlobalGraph g;
    const int n = 3 + static_cast<int>(rng.next_u64() % 20);
    const int gws = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int v = 0; v < n; ++v) g.add_vertex(v, v < gws);
    for (int v = 1; v < n; ++v)
      g.add_edge(static_cast<NodeId>(rng.next_u64() % v), v, rng.uniform(5, 120));
    for (int k = 0; k < n / 2; ++k) {
      const NodeId a = rng.next_u64() % n, b = rng.next_u64() % n;
      if (a != b && !g.edges.count({std::min(a, b), std::max(a, b)})) g.add_edge(a, b, rng.uniform(5, 120));
    }
    plan(g);
    for (NodeId gw : g.gateways()) {
      const auto reach = downlink_coverage(g, gw);
      for (NodeId m : subgraph_members(g, gw)) CHECK(reach.count(m));
    }
  }
}

TEST_CASE("route chunks carry every row and pair") {
  const Topology t = load_topology(LORAMESH_SCENARIO_DIR "/representative.json");
  GlobalGraph g = aggregate(t.with_role(Role::Gateway), ideal_reports(t, 255));
  plan(g);
  for (int limit : {255, 40}) {
    const auto chunks = emit_chunks(g, limit);
    std::size_t rows = 0, pairs = 0, expect_pairs = 0;
    for (const auto& c : chunks) {
      rows += c.rows.size();
      pairs += c.pairs.size();
    }
    for (const auto& [uid, v] : g.vertices) expect_pairs += v.downstream.size();
    CHECK(rows == g.vertices.size());
    CHECK(pairs == expect_pairs);
  }
}
