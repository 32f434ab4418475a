#include "loramesh/energy.hpp"

#include <algorithm>

namespace loramesh {

void EnergyLedger::add_node(NodeId node, bool mains_powered) {
  NodeEnergy e;
  e.capacity_mah = model_.battery_capacity_mah;
  e.remaining_mah = model_.battery_capacity_mah;
  e.mains_powered = mains_powered;
  e.history.emplace_back(0.0, 100);
  nodes_[node] = std::move(e);
}

double EnergyLedger::current_ma(RadioState state) const {
  switch (state) {
    case RadioState::Tx: return model_.i_tx_ma;
    case RadioState::Rx: return model_.i_rx_ma;
    case RadioState::Idle: return model_.i_idle_ma;
  }
  return model_.i_idle_ma;
}

void EnergyLedger::charge_interval(NodeId node, RadioState state, double start, double duration) {
  auto& e = nodes_.at(node);
  if (e.dead || duration <= 0.0) return;
  const double current = current_ma(state);
  double used = duration * current / 3600.0;
  double spent = duration;

  if (!e.mains_powered && used >= e.remaining_mah) {
    spent = e.remaining_mah * 3600.0 / current;
    used = e.remaining_mah;
    e.dead = true;
    e.death_time = start + spent;
  }
  switch (state) {
    case RadioState::Tx: e.tx_s += spent; break;
    case RadioState::Rx: e.rx_s += spent; break;
    case RadioState::Idle: e.idle_s += spent; break;
  }
  const double before = e.remaining_mah;
  e.remaining_mah = e.dead ? 0.0 : std::max(0.0, e.remaining_mah - used);
  if (e.mains_powered) {
    // Track consumption without depleting: grow capacity alongside.
    e.capacity_mah += used;
    e.remaining_mah = before;
    return;
  }
  const int level = quantize_battery(e.remaining_mah, e.capacity_mah);
  if (level < e.level) {
    // time at which the charge fell to the top of the new level
    const double boundary = (level + 1) * e.capacity_mah / 100.0;
    double t = start + (before - boundary) * 3600.0 / current;
    t = std::clamp(t, start, start + spent);
    if (e.dead) t = e.death_time;
    e.level = level;
    e.history.emplace_back(t, level);
  }
}

int EnergyLedger::level_at(NodeId node, double t) const {
  const auto& h = nodes_.at(node).history;
  int level = 100;
  for (const auto& [when, lvl] : h) {
    if (when > t) break;
    level = lvl;
  }
  return level;
}

}  // namespace loramesh
