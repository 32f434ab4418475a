#pragma once

#include <map>
#include <string>
#include <vector>

#include "loramesh/energy.hpp"
#include "loramesh/learning.hpp"
#include "loramesh/planner.hpp"
#include "loramesh/routing.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/trace.hpp"
#include "loramesh/wire.hpp"

namespace loramesh {

/// Phase markers carried by PhaseChange events (in `value`).
enum class Phase : int { Beacons = 1, Reports = 2, Dissemination = 3, Traffic = 4 };

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<TraceEvent> trace;
  EnergyLedger ledger;
  std::map<NodeId, Role> roles;
  /// Repeater and gateway tables at the end of learning.
  std::map<NodeId, LearnedTable> learned;
  /// Operational routing state at the end of the run.
  std::map<NodeId, RouteState> routes;
  /// Repeaters that switched to routing mode at traffic start.
  std::vector<NodeId> routing_nodes;
  /// Reports as received by the server and the plan built from them.
  std::vector<wire::NeighborReport> reports;
  GlobalGraph plan;
  std::vector<std::string> warnings;
  double traffic_start = 0.0;
  double end_time = 0.0;
  bool hit_horizon = false;
};

/// Runs one scenario with one seed. Deterministic in (scenario, seed).
RunResult simulate(const Scenario& scenario, std::uint64_t seed);

/// Neighbor reports a repeater would send if distance estimation were exact,
/// built from the topology's link table.
std::vector<wire::NeighborReport> ideal_reports(const Topology& topology, int max_payload);

}  // namespace loramesh
