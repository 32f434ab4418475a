#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "loramesh/core.hpp"

namespace loramesh {

/// Log-distance path loss. With shadowing_sigma_db == 0 the model is
/// deterministic.
struct PathLossModel {
  double ref_distance_m = 1.0;
  double ref_loss_db = 40.0;
  double exponent = 2.5;
  double shadowing_sigma_db = 0.0;

  void validate() const;
};

struct PathLoss {
  double loss_db = 0.0;
  bool clamped = false;  // distance was below the reference distance
};

/// Mean loss plus an optional shadowing term (0 unless the caller drew one).
PathLoss path_loss(const PathLossModel& model, double distance_m, double shadowing_db = 0.0);

/// Ptx - L(d). nullopt for unreachable links.
std::optional<double> received_power(double tx_power_dbm, const PathLossModel& model,
                                     std::optional<double> distance_m);

/// Symmetric pairwise link table. Pairs that are not listed are unreachable.
class LinkModel {
 public:
  double sensitivity_dbm = -116.0;
  double capture_threshold_db = 6.0;

  void set_distance(NodeId a, NodeId b, double distance_m);
  std::optional<double> distance(NodeId a, NodeId b) const;
  bool reachable(NodeId a, NodeId b) const { return distance(a, b).has_value(); }
  std::vector<NodeId> neighbors(NodeId node) const;
  const std::map<std::pair<NodeId, NodeId>, double>& edges() const { return edges_; }

 private:
  static std::pair<NodeId, NodeId> key(NodeId a, NodeId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }
  std::map<std::pair<NodeId, NodeId>, double> edges_;
};

enum class RxOutcome { Received, CollidedLost, BelowSensitivity };

/// One transmission as seen by a single receiver.
struct HeardTransmission {
  double start = 0.0;
  double end = 0.0;
  double power_dbm = 0.0;
};

/// Collision resolution at one receiver for transmissions on one channel.
/// A transmission is received when it clears sensitivity and beats every
/// above-sensitivity transmission overlapping it by the capture threshold.
std::vector<RxOutcome> resolve_reception(std::span<const HeardTransmission> overlapping,
                                         double sensitivity_dbm, double capture_threshold_db);

}  // namespace loramesh
