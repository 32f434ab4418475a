#include <doctest.h>

#include <sstream>

#include "loramesh/metrics.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/simulator.hpp"

using namespace loramesh;

namespace {
TraceEvent ev(double t, NodeId node, PacketId p, TraceKind k, double value = 0.0, double extra = 0.0,
              NodeId peer = kNoNode) {
  return {t, node, p, k, peer, value, extra, PacketKind::DataUp};
}
}  // namespace

TEST_CASE("loss classification and latency from a synthetic trace") {
  const std::map<NodeId, Role> roles{{0, Role::Gateway}, {1, Role::Repeater}, {101, Role::EndDevice}};
  std::vector<TraceEvent> t{
      ev(0.0, 0, 0, TraceKind::PhaseChange, 4),
      ev(0.0, 1, 0, TraceKind::EnergyMark, 0.0, 0.0),
      ev(1.0, 101, 1, TraceKind::Generated),
      ev(2.0, 101, 2, TraceKind::Generated),
      ev(3.0, 101, 3, TraceKind::Generated),
      ev(1.02, 1, 1, TraceKind::RxOk),
      ev(1.2, 0, 1, TraceKind::DeliveredToGateway, 0.2, 1),
      ev(1.3, 0, 1, TraceKind::DuplicateSuppressed),
      ev(2.02, 1, 2, TraceKind::RxOk),
      ev(10.0, 1, 0, TraceKind::EnergyFinal, 0.5, 0.25),
  };
  const auto m = compute_metrics(t, roles);
  CHECK(m.generated == 3);
  CHECK(m.delivered == 1);
  CHECK(m.lost_intermediate == 1);
  CHECK(m.lost_initial_ed == 1);
  CHECK(*m.pdr == doctest::Approx(1.0 / 3));
  CHECK(m.latency->mean_ms == doctest::Approx(200.0));
  CHECK(m.window_s == doctest::Approx(10.0));
  CHECK(m.nodes.at(1).duty_cycle_pct == doctest::Approx(2.5));
  CHECK(m.repeater_energy_mah == doctest::Approx(0.5));
  CHECK(m.counters.at("duplicates") == 1);
}

TEST_CASE("p95 uses the nearest rank") {
  const std::map<NodeId, Role> roles{{0, Role::Gateway}, {101, Role::EndDevice}};
  std::vector<TraceEvent> t{ev(0.0, 0, 0, TraceKind::PhaseChange, 4)};
  for (PacketId p = 1; p <= 20; ++p) {
    t.push_back(ev(1.0, 101, p, TraceKind::Generated));
    t.push_back(ev(2.0, 0, p, TraceKind::DeliveredToGateway, p / 1000.0));
  }
  const auto m = compute_metrics(t, roles);
  CHECK(m.latency->p95_ms == doctest::Approx(19.0));
  CHECK(m.latency->median_ms == doctest::Approx(10.5));
}

TEST_CASE("duty extremes ignore gateways") {
  RunMetrics m;
  m.nodes[0].duty_cycle_pct = 0.0;
  m.nodes[1].duty_cycle_pct = 3.0;
  m.nodes[1].repeater = true;
  m.nodes[2].duty_cycle_pct = 5.0;
  m.nodes[2].repeater = true;
  CHECK(m.min_repeater_duty() == 3.0);
  CHECK(m.max_repeater_duty() == 5.0);
}

TEST_CASE("metrics recomputed from a serialized trace are identical") {
  Scenario s = load_scenario(LORAMESH_SCENARIO_DIR "/representative_routing.json");
  s.traffic.packets = 800;
  const auto r = simulate(s, 2);
  std::stringstream ss;
  write_ndjson(ss, r.trace);
  const auto back = read_ndjson(ss);
  CHECK(metrics_to_string(compute_metrics(back, r.roles)) ==
        metrics_to_string(compute_metrics(r.trace, r.roles)));
}

TEST_CASE("loss rows sum to the generated count") {
  Scenario s = load_scenario(LORAMESH_SCENARIO_DIR "/representative_flooding.json");
  s.traffic.packets = 800;
  const auto m = compute_metrics(simulate(s, 2).trace, s.topology.roles());
  CHECK(m.delivered + m.lost_initial_ed + m.lost_intermediate == m.generated);
  CHECK(m.generated == 800);
}

TEST_CASE("battery spread counts dead nodes at zero") {
  RunMetrics m;
  m.battery = {{10.0, 1, 90}, {20.0, 2, 50}, {30.0, 2, 0}};
  const std::map<NodeId, Role> roles{{1, Role::Repeater}, {2, Role::Repeater}, {0, Role::Gateway}};
  CHECK(battery_spread_at(m, roles, 5.0) == 0);
  CHECK(battery_spread_at(m, roles, 25.0) == 40);
  CHECK(battery_spread_at(m, roles, 35.0) == 90);
  CHECK(battery_spread_at(m, std::set<NodeId>{1}, 35.0) == 0);
}

TEST_CASE("json output keeps null pdr") {
  RunMetrics m;
  const auto j = metrics_to_json(m);
  CHECK(j["pdr"].is_null());
  CHECK(battery_csv(m).rfind("time,node,level", 0) == 0);
}
