#include "loramesh/routing.hpp"

namespace loramesh {

RouteState RouteState::from_learned(const LearnedTable& table) {
  RouteState s;
  s.self = table.self;
  s.own_value = table.own_distance_value.value_or(0.0);
  s.upstream_original = s.upstream_current = table.upstream;
  s.downstream_original = s.downstream_current = table.downstream;
  for (const auto& [uid, rec] : table.neighbors) {
    if (rec.distance_value) s.neighbor_values[uid] = *rec.distance_value;
  }
  return s;
}

std::optional<double> RouteState::value_of(NodeId node) const {
  if (node == self) return own_value;
  auto it = neighbor_values.find(node);
  if (it == neighbor_values.end()) return std::nullopt;
  return it->second;
}

int RouteState::level_of(NodeId node) const {
  if (node == self) return own_level;
  auto it = neighbor_levels.find(node);
  return it == neighbor_levels.end() ? 100 : it->second;
}

std::optional<int> take_piggyback(RouteState& state) {
  if (state.own_level >= state.last_announced_level) return std::nullopt;
  state.last_announced_level = state.own_level;
  return state.own_level;
}

bool should_arm_standby(const RouteState& state, NodeId tx, NodeId addressee, Direction dir,
                        bool addressee_is_gateway) {
  if (tx == state.self || addressee == state.self || addressee_is_gateway) return false;
  const auto v_tx = state.value_of(tx);
  const auto v_addr = state.value_of(addressee);
  if (!v_tx || !v_addr) return false;
  if (dir == Direction::Up) return *v_tx > state.own_value && *v_addr < *v_tx;
  return *v_tx < state.own_value && *v_addr > *v_tx;
}

bool case1_triggers(int battery_f, int level_e, int level_e_next) {
  return battery_f % 10 == 0 && level_e > battery_f + 10 && level_e_next > battery_f + 10;
}

bool case2_triggers(int battery_d, int level_e) {
  return battery_d % 10 == 0 && level_e > battery_d;
}

SwitchCase evaluate_switch(const RouteState& state, const StandbyMonitor& monitor,
                           int announced_level) {
  const auto v_fwd = state.value_of(monitor.intended_next);
  if (!v_fwd) return SwitchCase::None;
  const bool forwarder_closer = monitor.direction == Direction::Up ? *v_fwd < state.own_value
                                                                   : *v_fwd > state.own_value;
  if (forwarder_closer) {
    const NodeId next = state.upstream_original;
    if (next == kNoNode) return SwitchCase::None;
    return case1_triggers(announced_level, state.own_level, state.level_of(next))
               ? SwitchCase::Case1
               : SwitchCase::None;
  }
  return case2_triggers(announced_level, state.own_level) ? SwitchCase::Case2 : SwitchCase::None;
}

bool apply_route_switch(RouteState& state, NodeId sender, NodeId replaced, Direction dir) {
  if (!state.knows(sender)) return false;
  if (dir == Direction::Up) {
    state.upstream_current = sender;
  } else {
    state.downstream_current.erase(replaced);
    state.downstream_current.insert(sender);
  }
  return true;
}

}  // namespace loramesh
