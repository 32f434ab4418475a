#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "loramesh/core.hpp"
#include "loramesh/radio.hpp"
#include "loramesh/wire.hpp"

namespace loramesh {

struct DistanceEstimate {
  double distance_m = 0.0;
  bool degenerate = false;  // path loss at or below the reference loss
};

/// Inverts the log-distance model: d = d0 * 10^((Ptx - Prx - L(d0)) / (10 gamma)).
DistanceEstimate estimate_distance(double tx_power_dbm, double rx_power_dbm,
                                   const PathLossModel& model);

struct NeighborRecord {
  NodeId neighbor = kNoNode;
  int samples = 0;
  double avg_prx_dbm = 0.0;
  double est_distance_m = 0.0;
  std::optional<double> distance_value;  // learned from dissemination
  int last_battery_level = 100;
};

/// What one repeater knows after the learning phase.
struct LearnedTable {
  NodeId self = kNoNode;
  std::map<NodeId, NeighborRecord> neighbors;
  std::optional<double> own_distance_value;
  NodeId upstream = kNoNode;
  std::set<NodeId> downstream;

  bool has_route() const { return own_distance_value.has_value(); }
  /// Distance value of a neighbor (or self), if known.
  std::optional<double> value_of(NodeId node) const;
};

/// Folds one received beacon into the running mean and refreshes the
/// distance estimate.
void record_beacon(LearnedTable& table, NodeId tx, double prx_dbm, double tx_power_dbm,
                   const PathLossModel& model);

struct NeighborReportOutput {
  std::vector<wire::NeighborReport> chunks;
  std::vector<std::string> warnings;
};

/// Neighbor list as (uid, estimated distance) report bodies, ordered by uid.
NeighborReportOutput emit_neighbor_report(const LearnedTable& table, int max_payload);

/// Installs the rows of a dissemination chunk relevant to this repeater:
/// its own row, rows of its neighbors, and downlink pairs it parents.
/// Idempotent.
void install_routing(LearnedTable& table, const wire::RouteTableChunk& chunk);

}  // namespace loramesh
