#include "loramesh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace loramesh {

double RunMetrics::max_repeater_duty() const {
  double v = 0.0;
  bool any = false;
  for (const auto& [uid, n] : nodes) {
    (void)uid;
    if (!n.repeater) continue;
    v = any ? std::max(v, n.duty_cycle_pct) : n.duty_cycle_pct;
    any = true;
  }
  return v;
}

double RunMetrics::min_repeater_duty() const {
  double v = 0.0;
  bool any = false;
  for (const auto& [uid, n] : nodes) {
    (void)uid;
    if (!n.repeater) continue;
    v = any ? std::min(v, n.duty_cycle_pct) : n.duty_cycle_pct;
    any = true;
  }
  return v;
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
  // nearest rank
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

bool is_role(const std::map<NodeId, Role>& roles, NodeId uid, Role r) {
  auto it = roles.find(uid);
  return it != roles.end() && it->second == r;
}

}  // namespace

RunMetrics compute_metrics(const std::vector<TraceEvent>& trace, const std::map<NodeId, Role>& roles) {
  RunMetrics m;
  std::set<PacketId> generated;
  std::unordered_set<PacketId> infra_heard;
  std::unordered_set<PacketId> delivered;
  std::vector<double> latencies;
  std::map<NodeId, std::pair<double, double>> mark;  // consumed, tx_s at traffic start
  std::map<PacketId, std::set<NodeId>> downlink;
  auto& c = m.counters;
  for (const char* k :
       {"tx", "tx_data", "tx_control", "rx_ok", "rx_collided", "rx_below_sensitivity",
        "dropped_busy_tx", "standby_armed", "standby_fired", "standby_cancelled",
        "standby_evicted", "route_switch_issued", "route_switch_applied", "duplicates",
        "queue_overflow", "node_deaths"})
    c[k] = 0;

  double last_time = 0.0;
  for (const auto& e : trace) {
    last_time = std::max(last_time, e.time);
    const bool data = e.packet_kind == PacketKind::DataUp || e.packet_kind == PacketKind::DataDown;
    switch (e.kind) {
      case TraceKind::Generated:
        if (e.packet_kind == PacketKind::DataUp) generated.insert(e.packet);
        break;
      case TraceKind::TxStart:
        ++c["tx"];
        ++c[data ? "tx_data" : "tx_control"];
        break;
      case TraceKind::RxOk:
        ++c["rx_ok"];
        if (e.packet_kind == PacketKind::DataUp && !is_role(roles, e.node, Role::EndDevice))
          infra_heard.insert(e.packet);
        if (e.packet_kind == PacketKind::DataDown && is_role(roles, e.node, Role::Repeater))
          downlink[e.packet].insert(e.node);
        break;
      case TraceKind::RxCollided: ++c["rx_collided"]; break;
      case TraceKind::RxBelowSens: ++c["rx_below_sensitivity"]; break;
      case TraceKind::DroppedBusyTx: ++c["dropped_busy_tx"]; break;
      case TraceKind::StandbyArmed: ++c["standby_armed"]; break;
      case TraceKind::StandbyFired: ++c["standby_fired"]; break;
      case TraceKind::StandbyCancelled: ++c["standby_cancelled"]; break;
      case TraceKind::StandbyEvicted: ++c["standby_evicted"]; break;
      case TraceKind::RouteSwitched:
        ++c[e.extra == 0.0 ? "route_switch_issued" : "route_switch_applied"];
        break;
      case TraceKind::DeliveredToGateway:
        if (delivered.insert(e.packet).second) latencies.push_back(e.value * 1000.0);
        break;
      case TraceKind::DuplicateSuppressed: ++c["duplicates"]; break;
      case TraceKind::QueueOverflow: ++c["queue_overflow"]; break;
      case TraceKind::BatteryLevel:
        m.battery.push_back({e.extra, e.node, static_cast<int>(e.value)});
        m.nodes[e.node].final_level = static_cast<int>(e.value);
        break;
      case TraceKind::NodeDied:
        ++c["node_deaths"];
        m.nodes[e.node].death_time = e.value;
        if (is_role(roles, e.node, Role::Repeater))
          m.lifetime_s = m.lifetime_s ? std::min(*m.lifetime_s, e.value) : e.value;
        break;
      case TraceKind::EnergyMark:
        mark[e.node] = {e.value, e.extra};
        break;
      case TraceKind::EnergyFinal: {
        auto& n = m.nodes[e.node];
        n.total_energy_mah = e.value;
        const auto base = mark.count(e.node) ? mark[e.node] : std::pair<double, double>{0.0, 0.0};
        n.energy_mah = e.value - base.first;
        n.tx_s = e.extra - base.second;
        break;
      }
      case TraceKind::PhaseChange:
        if (static_cast<int>(e.value) == 4) m.traffic_start = e.time;
        break;
      case TraceKind::TxEnd:
        break;
    }
  }
  m.end_time = last_time;
  m.window_s = std::max(0.0, m.end_time - m.traffic_start);

  m.generated = static_cast<std::int64_t>(generated.size());
  for (PacketId id : generated) {
    if (delivered.count(id)) {
      ++m.delivered;
    } else if (infra_heard.count(id)) {
      ++m.lost_intermediate;
    } else {
      ++m.lost_initial_ed;
    }
  }
  if (m.generated > 0) m.pdr = static_cast<double>(m.delivered) / static_cast<double>(m.generated);

  if (!latencies.empty()) {
    std::vector<double> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    LatencyStats s;
    s.mean_ms = std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                static_cast<double>(latencies.size());
    const auto n = sorted.size();
    s.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    s.p95_ms = percentile(sorted, 0.95);
    m.latency = s;
  }

  for (auto& [uid, n] : m.nodes) {
    if (m.window_s > 0.0) n.duty_cycle_pct = std::clamp(100.0 * n.tx_s / m.window_s, 0.0, 100.0);
    n.repeater = is_role(roles, uid, Role::Repeater);
    if (n.repeater) m.repeater_energy_mah += n.energy_mah;
  }
  // Gateways are reported separately; duty-cycle extremes cover repeaters.
  for (auto it = m.nodes.begin(); it != m.nodes.end();) {
    if (!is_role(roles, it->first, Role::Repeater) && !is_role(roles, it->first, Role::Gateway))
      it = m.nodes.erase(it);
    else
      ++it;
  }
  if (m.window_s > 0.0) {
    m.offered_pps = static_cast<double>(m.generated) / m.window_s;
    m.delivered_pps = static_cast<double>(m.delivered) / m.window_s;
  }
  for (const auto& [id, set] : downlink) m.downlink_reach[id] = static_cast<int>(set.size());
  return m;
}

int battery_spread_at(const RunMetrics& m, const std::map<NodeId, Role>& roles, double t) {
  std::set<NodeId> repeaters;
  for (const auto& [uid, r] : roles)
    if (r == Role::Repeater) repeaters.insert(uid);
  return battery_spread_at(m, repeaters, t);
}

int battery_spread_at(const RunMetrics& m, const std::set<NodeId>& nodes, double t) {
  std::map<NodeId, int> level;
  for (NodeId uid : nodes) level[uid] = 100;
  for (const auto& p : m.battery)
    if (p.time <= t && level.count(p.node)) level[p.node] = std::min(level[p.node], p.level);
  if (level.empty()) return 0;
  int lo = 100, hi = 0;
  for (const auto& [uid, l] : level) {
    (void)uid;
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  return hi - lo;
}

nlohmann::ordered_json metrics_to_json(const RunMetrics& m) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["generated"] = m.generated;
  j["delivered"] = m.delivered;
  j["pdr"] = m.pdr ? ordered_json(*m.pdr) : ordered_json(nullptr);
  j["losses"] = {{"initial_ed", m.lost_initial_ed}, {"intermediate", m.lost_intermediate}};
  if (m.latency) {
    j["latency_ms"] = {{"mean", m.latency->mean_ms},
                       {"median", m.latency->median_ms},
                       {"p95", m.latency->p95_ms}};
  } else {
    j["latency_ms"] = nullptr;
  }
  j["traffic_start_s"] = m.traffic_start;
  j["end_time_s"] = m.end_time;
  j["window_s"] = m.window_s;
  j["repeater_energy_mah"] = m.repeater_energy_mah;
  j["lifetime_s"] = m.lifetime_s ? ordered_json(*m.lifetime_s) : ordered_json(nullptr);
  j["throughput"] = {{"offered_pps", m.offered_pps}, {"delivered_pps", m.delivered_pps}};
  ordered_json nodes = ordered_json::object();
  for (const auto& [uid, n] : m.nodes) {
    nodes[std::to_string(uid)] = {
        {"duty_cycle_pct", n.duty_cycle_pct},
        {"energy_mah", n.energy_mah},
        {"total_energy_mah", n.total_energy_mah},
        {"tx_s", n.tx_s},
        {"final_level", n.final_level},
        {"death_time_s", n.death_time ? ordered_json(*n.death_time) : ordered_json(nullptr)}};
  }
  j["nodes"] = nodes;
  ordered_json counters = ordered_json::object();
  for (const auto& [k, v] : m.counters) counters[k] = v;
  j["counters"] = counters;
  ordered_json reach = ordered_json::object();
  for (const auto& [id, n] : m.downlink_reach) reach[std::to_string(id)] = n;
  j["downlink_reach"] = reach;
  return j;
}

std::string metrics_to_string(const RunMetrics& m) { return metrics_to_json(m).dump(2) + "\n"; }

std::string battery_csv(const RunMetrics& m) {
  std::ostringstream os;
  os.precision(17);
  os << "time,node,level\n";
  for (const auto& p : m.battery) os << p.time << ',' << p.node << ',' << p.level << '\n';
  return os.str();
}

}  // namespace loramesh
