#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loramesh/core.hpp"
#include "loramesh/radio.hpp"

namespace loramesh {

struct TopologyNode {
  NodeId uid = kNoNode;
  Role role = Role::Repeater;
  NodeId attach = kNoNode;  // end devices only
  double attach_distance_m = 10.0;
  std::string label;
};

/// Node roster plus explicit link distances. Pairs without a link are
/// unreachable (tunnel occlusion).
struct Topology {
  std::string name;
  std::vector<TopologyNode> nodes;
  LinkModel links;

  const TopologyNode& node(NodeId uid) const;
  bool contains(NodeId uid) const;
  std::vector<NodeId> with_role(Role role) const;
  std::map<NodeId, Role> roles() const;
  void validate() const;
};

Topology topology_from_json(const nlohmann::json& j);
nlohmann::json topology_to_json(const Topology& t);

enum class Protocol { Flooding, Routing, RoutingNoEnergy };
std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct TrafficParams {
  double mean_interval_s = 2.0;
  int payload_bytes = payload::kDataDefault;
  std::int64_t packets = 10'000;
  struct Scripted {
    NodeId end_device = kNoNode;
    double at_s = 0.0;  // relative to traffic start
  };
  /// When non-empty, replaces random generation.
  std::vector<Scripted> scripted;
  /// Gateway-originated downlink packets (relative times).
  std::vector<double> downlink_at_s;
};

struct MacParams {
  double wait_min_s = 0.010;
  double wait_max_s = 0.100;
  double backoff_min_s = 0.010;
  double backoff_max_s = 0.100;
  std::size_t queue_capacity = 256;
  double dedup_ttl_s = 60.0;
  std::size_t dedup_capacity = 4096;
};

struct RoutingParams {
  bool standby = true;
  double standby_min_s = 0.150;
  double standby_max_s = 0.400;
  std::size_t standby_buffer = 16;
};

enum class LearningMode { InSim, Oracle };

struct LearningParams {
  LearningMode mode = LearningMode::InSim;
  int beacon_rounds = 3;
  double t1_s = 30.0;
  double t2_s = 120.0;
  double t3_s = 180.0;
  int max_control_payload = payload::kMaxPhy;
};

/// Raw transmission injected when `trigger_node` starts sending a packet of
/// `trigger_kind`. Bypasses the MAC; used to script hidden-node collisions.
struct Jam {
  NodeId node = kNoNode;
  NodeId trigger_node = kNoNode;
  PacketKind trigger_kind = PacketKind::DataUp;
  int count = 1;
  double delay_s = 0.0;
  int payload_bytes = payload::kDataDefault;
};

struct Scenario {
  std::string name;
  Topology topology;
  Protocol protocol = Protocol::Routing;
  TrafficParams traffic;
  RadioConfig radio;
  PathLossModel path_loss;
  EnergyModel energy;
  MacParams mac;
  RoutingParams routing;
  LearningParams learning;
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> horizon_s;
  std::vector<Jam> jams;

  bool uses_routing() const { return protocol != Protocol::Flooding; }
  bool energy_aware() const { return protocol == Protocol::Routing; }
  void validate() const;
};

/// Parses a scenario document. A string "topology" field is resolved
/// relative to `base_dir`.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
Topology load_topology(const std::filesystem::path& path);

}  // namespace loramesh
