#pragma once

#include <map>
#include <optional>
#include <set>

#include "loramesh/core.hpp"
#include "loramesh/learning.hpp"

namespace loramesh {

/// Operational routing state of one repeater.
struct RouteState {
  NodeId self = kNoNode;
  double own_value = 0.0;
  NodeId upstream_original = kNoNode;
  NodeId upstream_current = kNoNode;
  std::set<NodeId> downstream_original;
  std::set<NodeId> downstream_current;
  int own_level = 100;
  int last_announced_level = 100;
  std::map<NodeId, int> neighbor_levels;    // from piggybacks; unknown -> 100
  std::map<NodeId, double> neighbor_values;  // distance values; gateways at 0

  static RouteState from_learned(const LearnedTable& table);

  std::optional<double> value_of(NodeId node) const;
  int level_of(NodeId node) const;
  bool knows(NodeId node) const { return neighbor_values.count(node) != 0; }
};

/// A standby watch on one overheard forward.
struct StandbyMonitor {
  PacketId packet = 0;
  NodeId overheard_from = kNoNode;
  NodeId intended_next = kNoNode;
  double deadline = 0.0;
  Direction direction = Direction::Up;
};

/// Level to attach to the next forward, if it dropped since the last
/// announcement. Updates last_announced_level.
std::optional<int> take_piggyback(RouteState& state);

/// Whether `state.self`, having overheard tx -> addressee, should stand by.
/// Uplink: tx is farther from the gateway than this node and the addressee
/// is closer than tx. Downlink mirrors the ordering. Both peers must be
/// known neighbors with distance values; gateways as addressees never arm
/// a monitor because they do not re-forward uplink traffic.
bool should_arm_standby(const RouteState& state, NodeId tx, NodeId addressee, Direction dir,
                        bool addressee_is_gateway);

/// Case 1: a standby E sees forwarder F announce `battery_f`. Fires iff the
/// announcement is a multiple of 10 and both E and E's original next hop
/// are more than 10 levels above it.
bool case1_triggers(int battery_f, int level_e, int level_e_next);

/// Case 2: E sees D (farther from the gateway than E) announce `battery_d`.
/// Fires iff the announcement is a multiple of 10 and E is above it.
bool case2_triggers(int battery_d, int level_e);

enum class SwitchCase { None, Case1, Case2 };

/// Evaluates the energy-aware rule for a standby that just overheard the
/// intended forwarder's forward carrying a battery announcement. Dispatches
/// on whether the forwarder is closer to the gateway (Case 1) or farther
/// (Case 2) than this node.
SwitchCase evaluate_switch(const RouteState& state, const StandbyMonitor& monitor,
                           int announced_level);

/// Applies a RouteSwitch instruction from `sender`: uplink traffic now goes
/// to the sender; for downlink the sender replaces `replaced` in the
/// forwarding set. Returns false (state unchanged) if the sender is not a
/// known neighbor.
bool apply_route_switch(RouteState& state, NodeId sender, NodeId replaced, Direction dir);

}  // namespace loramesh
