#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>

#include "loramesh/metrics.hpp"
#include "loramesh/radio.hpp"
#include "loramesh/rng.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/simulator.hpp"

using namespace loramesh;

namespace {
const std::string dir = LORAMESH_SCENARIO_DIR;

Scenario from(const std::string& text) { return scenario_from_json(nlohmann::json::parse(text)); }

// GW0 - RP1 (50 m), ED101 next to RP1, one packet at 0.5 s.
Scenario chain(const char* protocol) {
  auto s = from(R"({
    "name": "chain",
    "topology": {
      "nodes": [
        {"uid": 0, "role": "gateway"},
        {"uid": 1, "role": "repeater"},
        {"uid": 101, "role": "end_device", "attach": 1, "attach_distance_m": 10}
      ],
      "links": [{"a": 0, "b": 1, "distance_m": 50}]
    },
    "learning": {"mode": "oracle"},
    "traffic": {"scripted": [{"ed": 101, "at_s": 0.5}]}
  })");
  s.protocol = protocol_from_string(protocol);
  return s;
}

// GW0 - 1 - 2 - 3 line, ED at 3.
Scenario line(const char* protocol) {
  auto s = from(R"({
    "name": "line",
    "topology": {
      "nodes": [
        {"uid": 0, "role": "gateway"},
        {"uid": 1, "role": "repeater"},
        {"uid": 2, "role": "repeater"},
        {"uid": 3, "role": "repeater"},
        {"uid": 103, "role": "end_device", "attach": 3}
      ],
      "links": [{"a": 0, "b": 1, "distance_m": 80}, {"a": 1, "b": 2, "distance_m": 80},
                {"a": 2, "b": 3, "distance_m": 80}]
    },
    "learning": {"mode": "oracle"},
    "traffic": {"scripted": [{"ed": 103, "at_s": 0.5}, {"ed": 103, "at_s": 5.0}]}
  })");
  s.protocol = protocol_from_string(protocol);
  return s;
}

int count(const RunResult& r, TraceKind k, std::optional<NodeId> node = std::nullopt) {
  return static_cast<int>(std::count_if(r.trace.begin(), r.trace.end(), [&](const TraceEvent& e) {
    return e.kind == k && (!node || e.node == *node);
  }));
}
}  // namespace

TEST_CASE("single-hop latency matches the hand computation") {
  for (const char* proto : {"flooding", "routing"}) {
    const Scenario s = chain(proto);
    const auto r = simulate(s, 11);
    const auto m = compute_metrics(r.trace, r.roles);
    REQUIRE(m.delivered == 1);
    // ED airtime, RP1's first random wait, RP1 airtime
    RngStream wait(11, 1, StreamPurpose::MacWait);
    const double expect = 2 * airtime(s.radio, 20) + wait.uniform(s.mac.wait_min_s, s.mac.wait_max_s);
    CHECK(m.latency->mean_ms == doctest::Approx(expect * 1000.0).epsilon(1e-9));
  }
}

TEST_CASE("engine capture agrees with the reception resolver") {
  for (double far_m : {100.0, 10.0, 12.0}) {
    auto s = from(R"({
      "name": "capture",
      "protocol": "flooding",
      "topology": {
        "nodes": [
          {"uid": 0, "role": "gateway"},
          {"uid": 1, "role": "repeater"},
          {"uid": 101, "role": "end_device", "attach": 1, "attach_distance_m": 10},
          {"uid": 102, "role": "end_device", "attach": 1, "attach_distance_m": 100}
        ],
        "links": [{"a": 0, "b": 1, "distance_m": 50}]
      },
      "traffic": {"scripted": [{"ed": 101, "at_s": 0.5}, {"ed": 102, "at_s": 0.505}]}
    })");
    for (auto& n : s.topology.nodes)
      if (n.uid == 102) n.attach_distance_m = far_m;
    const auto r = simulate(s, 1);

    const double t = airtime(s.radio, 20);
    const std::vector<HeardTransmission> heard{
        {0.5, 0.5 + t, *received_power(14.0, s.path_loss, 10.0)},
        {0.505, 0.505 + t, *received_power(14.0, s.path_loss, far_m)}};
    const auto expect = resolve_reception(heard, -116.0, 6.0);
    std::map<NodeId, TraceKind> got;
    for (const auto& e : r.trace)
      if (e.node == 1 && (e.kind == TraceKind::RxOk || e.kind == TraceKind::RxCollided) &&
          (e.peer == 101 || e.peer == 102))
        got[e.peer] = e.kind;
    auto as_kind = [](RxOutcome o) {
      return o == RxOutcome::Received ? TraceKind::RxOk : TraceKind::RxCollided;
    };
    CAPTURE(far_m);
    CHECK(got.at(101) == as_kind(expect[0]));
    CHECK(got.at(102) == as_kind(expect[1]));
  }
}

TEST_CASE("routed packets take one transmission per hop") {
  const auto r = simulate(line("routing"), 2);
  const auto m = compute_metrics(r.trace, r.roles);
  CHECK(m.delivered == 2);
  int data_tx = 0;
  for (const auto& e : r.trace)
    if (e.kind == TraceKind::TxStart && e.packet_kind == PacketKind::DataUp && r.roles.at(e.node) == Role::Repeater)
      ++data_tx;
  CHECK(data_tx == 2 * 3);
  CHECK(r.routing_nodes.size() == 3);
}

TEST_CASE("flooding rebroadcasts once per repeater") {
  const auto r = simulate(line("flooding"), 2);
  for (NodeId rp : {1, 2, 3}) CHECK(count(r, TraceKind::TxStart, rp) == 2);
  CHECK(compute_metrics(r.trace, r.roles).delivered == 2);
}

TEST_CASE("transmissions of one node never overlap") {
  Scenario s = load_scenario(dir + "/representative_flooding.json");
  s.traffic.packets = 1500;
  const auto r = simulate(s, 3);
  std::map<NodeId, double> busy_until;
  std::map<NodeId, int> open;
  for (const auto& e : r.trace) {
    if (e.kind == TraceKind::TxStart) {
      CHECK(open[e.node] == 0);
      CHECK(e.time >= busy_until[e.node]);
      ++open[e.node];
      busy_until[e.node] = e.time + e.value;
    } else if (e.kind == TraceKind::TxEnd) {
      --open[e.node];
    }
  }
}

TEST_CASE("every node's state time adds up to its lifetime") {
  Scenario s = load_scenario(dir + "/representative_routing.json");
  s.traffic.packets = 1000;
  const auto r = simulate(s, 4);
  for (const auto& [uid, n] : r.ledger.nodes()) {
    const double alive = n.dead ? n.death_time : r.end_time;
    CHECK(n.alive_s() == doctest::Approx(alive).epsilon(1e-9));
    const auto& em = r.ledger.model();
    const double charge = (n.tx_s * em.i_tx_ma + n.rx_s * em.i_rx_ma + n.idle_s * em.i_idle_ma) / 3600.0;
    CHECK(n.consumed_mah() == doctest::Approx(charge).epsilon(1e-9));
  }
}

TEST_CASE("zero packet budget gives a null pdr") {
  Scenario s = load_scenario(dir + "/representative_routing.json");
  s.traffic.packets = 0;
  const auto m = compute_metrics(simulate(s, 1).trace, s.topology.roles());
  CHECK(m.generated == 0);
  CHECK_FALSE(m.pdr.has_value());
  CHECK_FALSE(m.latency.has_value());
}

TEST_CASE("in-network learning recovers the reference routes") {
  Scenario s = load_scenario(dir + "/representative_routing.json");
  s.traffic.packets = 0;
  const auto r = simulate(s, 1);
  GlobalGraph ref = aggregate(s.topology.with_role(Role::Gateway), ideal_reports(s.topology, 255));
  plan(ref);
  CHECK(r.routing_nodes.size() == 17);
  for (NodeId rp : s.topology.with_role(Role::Repeater)) {
    CAPTURE(rp);
    CHECK(r.learned.at(rp).upstream == ref.vertices.at(rp).upstream);
    CHECK(*r.learned.at(rp).own_distance_value ==
          doctest::Approx(ref.vertices.at(rp).distance_value).epsilon(1e-3));
  }
  // traffic starts at the end of dissemination
  CHECK(r.traffic_start == doctest::Approx(s.learning.t3_s));
}

TEST_CASE("downlink from a gateway reaches its whole subgraph") {
  Scenario s = load_scenario(dir + "/representative_routing.json");
  s.traffic.packets = 0;
  s.learning.mode = LearningMode::Oracle;
  s.traffic.downlink_at_s = {1.0};
  const auto r = simulate(s, 1);
  const auto m = compute_metrics(r.trace, r.roles);
  REQUIRE(m.downlink_reach.size() == 1);
  CHECK(m.downlink_reach.begin()->second == 17);
}

TEST_CASE("same seed, same trace; different seed, different trace") {
  Scenario s = load_scenario(dir + "/representative_routing.json");
  s.traffic.packets = 500;
  const auto a = simulate(s, 5), b = simulate(s, 5), c = simulate(s, 6);
  CHECK(trace_digest(a.trace) == trace_digest(b.trace));
  CHECK(trace_digest(a.trace) != trace_digest(c.trace));
}

TEST_CASE("standby takes over after a hidden-node collision") {
  Scenario s = load_scenario(dir + "/standby_recovery.json");
  const auto on = simulate(s, 1);
  CHECK(count(on, TraceKind::StandbyFired, NodeId{4}) == 1);
  CHECK(compute_metrics(on.trace, on.roles).delivered == 1);
  s.routing.standby = false;
  const auto off = simulate(s, 1);
  CHECK(count(off, TraceKind::StandbyArmed) == 0);
  CHECK(compute_metrics(off.trace, off.roles).delivered == 0);
}

TEST_CASE("energy-aware switches are issued and applied") {
  Scenario s = load_scenario(dir + "/ablation_two_ed.json");
  s.traffic.packets = 6000;
  const auto r = simulate(s, 1);
  const auto m = compute_metrics(r.trace, r.roles);
  CHECK(m.counters.at("route_switch_issued") > 0);
  CHECK(m.counters.at("route_switch_applied") > 0);
  s.protocol = Protocol::RoutingNoEnergy;
  const auto off = compute_metrics(simulate(s, 1).trace, r.roles);
  const auto it = off.counters.find("route_switch_issued");
  CHECK((it == off.counters.end() || it->second == 0));
}
