#include "loramesh/learning.hpp"

#include <cmath>

namespace loramesh {

DistanceEstimate estimate_distance(double tx_power_dbm, double rx_power_dbm,
                                   const PathLossModel& model) {
  const double excess = tx_power_dbm - rx_power_dbm - model.ref_loss_db;
  if (excess <= 0.0) return {model.ref_distance_m, true};
  return {model.ref_distance_m * std::pow(10.0, excess / (10.0 * model.exponent)), false};
}

std::optional<double> LearnedTable::value_of(NodeId node) const {
  if (node == self) return own_distance_value;
  auto it = neighbors.find(node);
  if (it == neighbors.end()) return std::nullopt;
  return it->second.distance_value;
}

void record_beacon(LearnedTable& table, NodeId tx, double prx_dbm, double tx_power_dbm,
                   const PathLossModel& model) {
  auto& rec = table.neighbors[tx];
  rec.neighbor = tx;
  rec.samples += 1;
  rec.avg_prx_dbm += (prx_dbm - rec.avg_prx_dbm) / rec.samples;
  rec.est_distance_m = estimate_distance(tx_power_dbm, rec.avg_prx_dbm, model).distance_m;
}

NeighborReportOutput emit_neighbor_report(const LearnedTable& table, int max_payload) {
  NeighborReportOutput out;
  std::vector<wire::NeighborEntry> entries;
  for (const auto& [uid, rec] : table.neighbors) entries.push_back({uid, rec.est_distance_m});
  if (entries.empty())
    out.warnings.push_back("repeater " + std::to_string(table.self) +
                           " heard no neighbors during learning");
  out.chunks = wire::chunk_report(table.self, entries, max_payload);
  return out;
}

void install_routing(LearnedTable& table, const wire::RouteTableChunk& chunk) {
  for (const auto& row : chunk.rows) {
    if (row.uid == table.self) {
      table.own_distance_value = row.distance_value;
      table.upstream = row.upstream;
    }
  }
  for (const auto& row : chunk.rows) {
    if (row.uid == table.self) continue;
    auto it = table.neighbors.find(row.uid);
    if (it != table.neighbors.end()) {
      it->second.distance_value = row.distance_value;
    } else if (row.uid == table.upstream) {
      // Edge seen only from the other side: keep the upstream addressable.
      auto& rec = table.neighbors[row.uid];
      rec.neighbor = row.uid;
      rec.distance_value = row.distance_value;
    }
  }
  for (const auto& p : chunk.pairs)
    if (p.parent == table.self) table.downstream.insert(p.child);
}

}  // namespace loramesh
