#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "loramesh/core.hpp"
#include "loramesh/trace.hpp"

namespace loramesh {

struct NodeMetrics {
  double duty_cycle_pct = 0.0;  // tx time / operational window
  double energy_mah = 0.0;      // consumed during the operational window
  double total_energy_mah = 0.0;
  double tx_s = 0.0;
  int final_level = 100;
  std::optional<double> death_time;
  bool repeater = false;
};

struct LatencyStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

struct BatteryPoint {
  double time = 0.0;
  NodeId node = kNoNode;
  int level = 100;
};

struct RunMetrics {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::optional<double> pdr;  // null when nothing was generated
  std::int64_t lost_initial_ed = 0;
  std::int64_t lost_intermediate = 0;
  std::optional<LatencyStats> latency;
  double traffic_start = 0.0;
  double end_time = 0.0;
  double window_s = 0.0;
  std::map<NodeId, NodeMetrics> nodes;  // repeaters and gateways
  double repeater_energy_mah = 0.0;     // operational window, repeaters only
  std::optional<double> lifetime_s;     // first repeater death
  double offered_pps = 0.0;
  double delivered_pps = 0.0;
  std::map<std::string, std::int64_t> counters;
  /// Distinct repeaters that decoded each downlink packet.
  std::map<PacketId, int> downlink_reach;
  std::vector<BatteryPoint> battery;

  double max_repeater_duty() const;
  double min_repeater_duty() const;
};

RunMetrics compute_metrics(const std::vector<TraceEvent>& trace, const std::map<NodeId, Role>& roles);

/// Max minus min repeater battery level at time t (dead nodes count as 0).
int battery_spread_at(const RunMetrics& m, const std::map<NodeId, Role>& roles, double t);
/// Same, restricted to `nodes`.
int battery_spread_at(const RunMetrics& m, const std::set<NodeId>& nodes, double t);

nlohmann::ordered_json metrics_to_json(const RunMetrics& m);
std::string metrics_to_string(const RunMetrics& m);
/// time,node,level rows.
std::string battery_csv(const RunMetrics& m);

}  // namespace loramesh
