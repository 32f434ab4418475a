#pragma once

#include <map>
#include <utility>
#include <vector>

#include "loramesh/core.hpp"

namespace loramesh {

enum class RadioState : std::uint8_t { Idle, Rx, Tx };

struct NodeEnergy {
  double capacity_mah = 0.0;
  double remaining_mah = 0.0;
  double tx_s = 0.0;
  double rx_s = 0.0;
  double idle_s = 0.0;
  bool mains_powered = false;
  bool dead = false;
  double death_time = 0.0;
  int level = 100;
  /// (time, level) at every quantized decrease, starting with (0, 100).
  std::vector<std::pair<double, int>> history;

  double consumed_mah() const { return capacity_mah - remaining_mah; }
  double alive_s() const { return tx_s + rx_s + idle_s; }
};

/// Per-node charge accounting. Mains-powered nodes (gateways) accumulate state
/// durations and consumption but never deplete.
class EnergyLedger {
 public:
  EnergyLedger() = default;
  explicit EnergyLedger(EnergyModel model) : model_(model) {}

  void add_node(NodeId node, bool mains_powered = false);
  bool has(NodeId node) const { return nodes_.count(node) != 0; }
  const NodeEnergy& at(NodeId node) const { return nodes_.at(node); }
  const std::map<NodeId, NodeEnergy>& nodes() const { return nodes_; }
  const EnergyModel& model() const { return model_; }

  double current_ma(RadioState state) const;

  /// Draws duration * I(state) / 3600 mAh for an interval starting at
  /// `start`. Records history on quantized-level decreases and the exact
  /// death time if the battery empties inside the interval. No-op on a dead
  /// node.
  void charge_interval(NodeId node, RadioState state, double start, double duration);

  /// Battery level of `node` at time t, from its history.
  int level_at(NodeId node, double t) const;

 private:
  EnergyModel model_;
  std::map<NodeId, NodeEnergy> nodes_;
};

}  // namespace loramesh
