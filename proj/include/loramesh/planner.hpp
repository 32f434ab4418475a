#pragma once

#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "loramesh/core.hpp"
#include "loramesh/wire.hpp"

namespace loramesh {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct GraphEdge {
  double weight_m = 0.0;
  bool symmetric = false;  // observed from both ends
};

struct GraphVertex {
  NodeId uid = kNoNode;
  bool gateway = false;
  double distance_value = kUnreachable;
  NodeId nearest_gateway = kNoNode;
  NodeId predecessor = kNoNode;  // shortest-path tree parent
  NodeId upstream = kNoNode;     // lowest-valued neighbor
  std::vector<NodeId> downstream;
};

/// Server-side view of the network assembled from neighbor reports.
struct GlobalGraph {
  std::map<NodeId, GraphVertex> vertices;
  std::map<std::pair<NodeId, NodeId>, GraphEdge> edges;  // key: (min, max)
  std::vector<std::string> warnings;

  void add_vertex(NodeId uid, bool gateway = false);
  void add_edge(NodeId a, NodeId b, double weight, bool symmetric = true);
  std::vector<std::pair<NodeId, double>> adjacent(NodeId uid) const;
  std::vector<NodeId> gateways() const;
  std::vector<NodeId> unreachable() const;
};

/// Unions directed observations. Both directions observed -> mean weight;
/// one direction -> that weight, flagged asymmetric. Throws ConfigError when
/// no gateway is given.
GlobalGraph aggregate(const std::vector<NodeId>& gateways,
                      const std::vector<wire::NeighborReport>& reports);

/// Multi-source Dijkstra from every gateway. Ties resolve to the lower
/// gateway UID, then the lower predecessor UID.
void compute_distance_values(GlobalGraph& graph);

/// upstream = neighbor with the lowest distance value, lower UID on ties.
void assign_upstream(GlobalGraph& graph);

/// Greedy forwarder selection over each gateway's shortest-path tree.
void compute_downlink_sets(GlobalGraph& graph);

/// Runs the three passes above.
void plan(GlobalGraph& graph);

std::vector<wire::RouteTableChunk> emit_chunks(const GlobalGraph& graph, int max_payload);

/// Members of the subgraph rooted at `gateway` (including it).
std::set<NodeId> subgraph_members(const GlobalGraph& graph, NodeId gateway);

/// Nodes that transmit when `gateway` starts an idealized, loss-free
/// downlink flood that follows the downstream sets.
std::set<NodeId> simulate_downlink(const GlobalGraph& graph, NodeId gateway);

/// Nodes reached (heard at least one transmission) by simulate_downlink.
std::set<NodeId> downlink_coverage(const GlobalGraph& graph, NodeId gateway);

}  // namespace loramesh
