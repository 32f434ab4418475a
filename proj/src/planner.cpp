#include "loramesh/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cassert>
#include <deque>
#include <functional>
#include <tuple>

namespace loramesh {

namespace {

std::pair<NodeId, NodeId> edge_key(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

void GlobalGraph::add_vertex(NodeId uid, bool gateway) {
  auto& v = vertices[uid];
  v.uid = uid;
  v.gateway = v.gateway || gateway;
}

void GlobalGraph::add_edge(NodeId a, NodeId b, double weight, bool symmetric) {
  add_vertex(a);
  add_vertex(b);
  edges[edge_key(a, b)] = {weight, symmetric};
}

std::vector<std::pair<NodeId, double>> GlobalGraph::adjacent(NodeId uid) const {
  std::vector<std::pair<NodeId, double>> out;
  for (const auto& [k, e] : edges) {
    if (k.first == uid) out.emplace_back(k.second, e.weight_m);
    else if (k.second == uid) out.emplace_back(k.first, e.weight_m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> GlobalGraph::gateways() const {
  std::vector<NodeId> out;
  for (const auto& [uid, v] : vertices)
    if (v.gateway) out.push_back(uid);
  return out;
}

std::vector<NodeId> GlobalGraph::unreachable() const {
  std::vector<NodeId> out;
  for (const auto& [uid, v] : vertices)
    if (v.distance_value == kUnreachable) out.push_back(uid);
  return out;
}

GlobalGraph aggregate(const std::vector<NodeId>& gateways,
                      const std::vector<wire::NeighborReport>& reports) {
  if (gateways.empty()) throw ConfigError("route planning needs at least one gateway");
  GlobalGraph g;
  for (NodeId gw : gateways) g.add_vertex(gw, true);

  // Chunks of one report share a reporter but differ in chunk index. A
  // repeated (reporter, chunk) pair replaces the earlier copy.
  std::map<std::pair<NodeId, int>, const wire::NeighborReport*> latest;
  for (const auto& r : reports) {
    auto [it, fresh] = latest.try_emplace({r.reporter, r.chunk_index}, &r);
    if (!fresh) {
      g.warnings.push_back("duplicate report from " + std::to_string(r.reporter) +
                           " chunk " + std::to_string(r.chunk_index) + "; keeping the last");
      it->second = &r;
    }
  }

  std::map<std::pair<NodeId, NodeId>, double> observed;  // (reporter, neighbor)
  for (const auto& [key, r] : latest) {
    g.add_vertex(r->reporter);
    for (const auto& e : r->entries) {
      if (e.neighbor == r->reporter || !std::isfinite(e.distance_m) || e.distance_m <= 0.0)
        continue;
      observed[{r->reporter, e.neighbor}] = e.distance_m;
    }
  }
  for (const auto& [key, d] : observed) {
    const auto [a, b] = key;
    auto back = observed.find({b, a});
    if (back != observed.end()) {
      if (a < b) g.add_edge(a, b, (d + back->second) / 2.0, true);
    } else {
      g.add_edge(a, b, d, false);
      g.warnings.push_back("asymmetric link " + std::to_string(a) + "->" + std::to_string(b) +
                           " observed in one direction only");
    }
  }
  return g;
}

void compute_distance_values(GlobalGraph& graph) {
  for (auto& [uid, v] : graph.vertices) {
    v.distance_value = kUnreachable;
    v.nearest_gateway = kNoNode;
    v.predecessor = kNoNode;
  }
  // (distance, gateway, uid); ordered set keeps extraction deterministic
  std::set<std::tuple<double, NodeId, NodeId>> frontier;
  for (auto& [uid, v] : graph.vertices) {
    if (!v.gateway) continue;
    v.distance_value = 0.0;
    v.nearest_gateway = uid;
    frontier.emplace(0.0, uid, uid);
  }
  std::set<NodeId> settled;
  while (!frontier.empty()) {
    auto [d, gw, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    if (!settled.insert(u).second) continue;
    for (const auto& [nb, w] : graph.adjacent(u)) {
      if (settled.count(nb)) continue;
      auto& v = graph.vertices.at(nb);
      const double cand = d + w;
      const bool better =
          cand < v.distance_value ||
          (cand == v.distance_value &&
           std::pair{gw, u} < std::pair{v.nearest_gateway, v.predecessor});
      if (!better) continue;
      if (v.distance_value != kUnreachable)
        frontier.erase({v.distance_value, v.nearest_gateway, nb});
      v.distance_value = cand;
      v.nearest_gateway = gw;
      v.predecessor = u;
      frontier.emplace(cand, gw, nb);
    }
  }
  for (NodeId uid : graph.unreachable())
    graph.warnings.push_back("node " + std::to_string(uid) + " is not connected to any gateway");
}

void assign_upstream(GlobalGraph& graph) {
  for (auto& [uid, v] : graph.vertices) {
    v.upstream = kNoNode;
    if (v.gateway || v.distance_value == kUnreachable) continue;
    double best = kUnreachable;
    for (const auto& [nb, w] : graph.adjacent(uid)) {
      const double dv = graph.vertices.at(nb).distance_value;
      if (dv < best) {  // adjacency is uid-sorted, so ties keep the lower uid
        best = dv;
        v.upstream = nb;
      }
    }
    // The Dijkstra predecessor always has a strictly lower value.
    assert(v.upstream != kNoNode && best < v.distance_value);
  }
}

std::set<NodeId> subgraph_members(const GlobalGraph& graph, NodeId gateway) {
  std::set<NodeId> out;
  for (const auto& [uid, v] : graph.vertices)
    if (v.nearest_gateway == gateway) out.insert(uid);
  return out;
}

void compute_downlink_sets(GlobalGraph& graph) {
  for (auto& [uid, v] : graph.vertices) v.downstream.clear();

  for (NodeId root : graph.gateways()) {
    const auto members = subgraph_members(graph, root);
    std::map<NodeId, std::vector<NodeId>> children;
    for (NodeId m : members) {
      const auto& v = graph.vertices.at(m);
      if (m != root && v.predecessor != kNoNode) children[v.predecessor].push_back(m);
    }
    for (auto& [p, c] : children) std::sort(c.begin(), c.end());

    std::map<NodeId, std::set<NodeId>> subtree;
    std::function<const std::set<NodeId>&(NodeId)> collect = [&](NodeId n) -> const std::set<NodeId>& {
      auto& s = subtree[n];
      s.insert(n);
      for (NodeId c : children[n]) {
        const auto& cs = collect(c);
        s.insert(cs.begin(), cs.end());
      }
      return s;
    };
    collect(root);

    std::map<NodeId, std::set<NodeId>> closed_nbhd;  // members within one hop, plus self
    for (NodeId m : members) {
      auto& s = closed_nbhd[m];
      s.insert(m);
      for (const auto& [nb, w] : graph.adjacent(m))
        if (members.count(nb)) s.insert(nb);
    }

    std::set<NodeId> covered = closed_nbhd[root];
    std::deque<NodeId> queue{root};
    while (!queue.empty()) {
      const NodeId x = queue.front();
      queue.pop_front();
      auto& chosen = graph.vertices.at(x).downstream;
      auto needs_cover = [&](NodeId c) {
        return std::any_of(subtree[c].begin(), subtree[c].end(),
                           [&](NodeId n) { return !covered.count(n); });
      };
      while (true) {
        NodeId pick = kNoNode;
        std::size_t best_gain = 0;
        for (NodeId c : children[x]) {
          if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
          if (!needs_cover(c)) continue;
          std::size_t gain = 0;
          for (NodeId n : closed_nbhd[c]) gain += covered.count(n) ? 0 : 1;
          if (pick == kNoNode || gain > best_gain) {
            pick = c;
            best_gain = gain;
          }
        }
        if (pick == kNoNode) break;
        chosen.push_back(pick);
        covered.insert(closed_nbhd[pick].begin(), closed_nbhd[pick].end());
      }
      std::sort(chosen.begin(), chosen.end());
      for (NodeId c : chosen) queue.push_back(c);
    }
  }
}

void plan(GlobalGraph& graph) {
  compute_distance_values(graph);
  assign_upstream(graph);
  compute_downlink_sets(graph);
}

std::vector<wire::RouteTableChunk> emit_chunks(const GlobalGraph& graph, int max_payload) {
  std::vector<wire::RouteRow> rows;
  std::vector<wire::DownlinkPair> pairs;
  for (const auto& [uid, v] : graph.vertices) {
    if (v.distance_value == kUnreachable) continue;
    rows.push_back({uid, v.distance_value, v.upstream});
    for (NodeId c : v.downstream) pairs.push_back({uid, c});
  }
  return wire::chunk_table(rows, pairs, max_payload);
}

std::set<NodeId> simulate_downlink(const GlobalGraph& graph, NodeId gateway) {
  std::set<NodeId> transmitters{gateway};
  std::deque<NodeId> queue{gateway};
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    for (NodeId c : graph.vertices.at(x).downstream) {
      // a node only forwards if it actually hears x
      if (!graph.edges.count(edge_key(x, c))) continue;
      if (transmitters.insert(c).second) queue.push_back(c);
    }
  }
  return transmitters;
}

std::set<NodeId> downlink_coverage(const GlobalGraph& graph, NodeId gateway) {
  std::set<NodeId> reached;
  for (NodeId t : simulate_downlink(graph, gateway)) {
    reached.insert(t);
    for (const auto& [nb, w] : graph.adjacent(t)) reached.insert(nb);
  }
  return reached;
}

}  // namespace loramesh
