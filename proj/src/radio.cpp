#include "loramesh/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace loramesh {

void PathLossModel::validate() const {
  if (!(ref_distance_m > 0.0)) throw ConfigError("reference distance must be > 0");
  if (!(exponent > 0.0)) throw ConfigError("path loss exponent must be > 0");
  if (shadowing_sigma_db < 0.0) throw ConfigError("shadowing sigma must be >= 0");
}

PathLoss path_loss(const PathLossModel& model, double distance_m, double shadowing_db) {
  PathLoss out;
  double d = distance_m;
  if (d < model.ref_distance_m) {
    d = model.ref_distance_m;
    out.clamped = true;
  }
  out.loss_db = model.ref_loss_db + 10.0 * model.exponent * std::log10(d / model.ref_distance_m) +
                shadowing_db;
  return out;
}

std::optional<double> received_power(double tx_power_dbm, const PathLossModel& model,
                                     std::optional<double> distance_m) {
  if (!distance_m) return std::nullopt;
  return tx_power_dbm - path_loss(model, *distance_m).loss_db;
}

void LinkModel::set_distance(NodeId a, NodeId b, double distance_m) {
  if (a == b) throw ConfigError("node " + std::to_string(a) + " cannot link to itself");
  if (!(distance_m > 0.0))
    throw ConfigError("link " + std::to_string(a) + "-" + std::to_string(b) +
                      " needs a positive distance");
  edges_[key(a, b)] = distance_m;
}

std::optional<double> LinkModel::distance(NodeId a, NodeId b) const {
  if (a == b) return std::nullopt;
  auto it = edges_.find(key(a, b));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> LinkModel::neighbors(NodeId node) const {
  std::vector<NodeId> out;
  for (const auto& [k, d] : edges_) {
    if (k.first == node) out.push_back(k.second);
    else if (k.second == node) out.push_back(k.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RxOutcome> resolve_reception(std::span<const HeardTransmission> overlapping,
                                         double sensitivity_dbm, double capture_threshold_db) {
  const std::size_t n = overlapping.size();
  std::vector<RxOutcome> out(n, RxOutcome::CollidedLost);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tx = overlapping[i];
    if (tx.power_dbm < sensitivity_dbm) {
      out[i] = RxOutcome::BelowSensitivity;
      continue;
    }
    double strongest = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& other = overlapping[j];
      if (other.power_dbm < sensitivity_dbm) continue;
      const bool overlap = other.start < tx.end && tx.start < other.end;
      if (overlap) strongest = std::max(strongest, other.power_dbm);
    }
    if (tx.power_dbm - strongest >= capture_threshold_db) out[i] = RxOutcome::Received;
  }
  return out;
}

}  // namespace loramesh
