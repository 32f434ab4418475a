#include "loramesh/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace loramesh {

using nlohmann::json;

const TopologyNode& Topology::node(NodeId uid) const {
  for (const auto& n : nodes)
    if (n.uid == uid) return n;
  throw ConfigError("unknown node " + std::to_string(uid));
}

bool Topology::contains(NodeId uid) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const auto& n) { return n.uid == uid; });
}

std::vector<NodeId> Topology::with_role(Role role) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes)
    if (n.role == role) out.push_back(n.uid);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<NodeId, Role> Topology::roles() const {
  std::map<NodeId, Role> out;
  for (const auto& n : nodes) out[n.uid] = n.role;
  return out;
}

void Topology::validate() const {
  std::set<NodeId> seen;
  for (const auto& n : nodes) {
    if (n.uid == kNoNode || n.uid >= 0xFFFF)
      throw ConfigError("node uid " + std::to_string(n.uid) + " out of range");
    if (!seen.insert(n.uid).second) throw ConfigError("duplicate node uid " + std::to_string(n.uid));
  }
  if (with_role(Role::Gateway).empty()) throw ConfigError("topology has zero gateways");
  for (const auto& n : nodes) {
    if (n.role != Role::EndDevice) continue;
    if (!seen.count(n.attach))
      throw ConfigError("end device " + std::to_string(n.uid) + " attaches to unknown node " +
                        std::to_string(n.attach));
    if (node(n.attach).role == Role::EndDevice)
      throw ConfigError("end device " + std::to_string(n.uid) + " attaches to another end device");
    if (!(n.attach_distance_m > 0.0))
      throw ConfigError("end device " + std::to_string(n.uid) + " needs a positive attach distance");
  }
  for (const auto& [k, d] : links.edges()) {
    if (!seen.count(k.first) || !seen.count(k.second))
      throw ConfigError("link " + std::to_string(k.first) + "-" + std::to_string(k.second) +
                        " references an unknown node");
  }
}

Topology topology_from_json(const json& j) {
  Topology t;
  t.name = j.value("name", "");
  for (const auto& jn : j.at("nodes")) {
    TopologyNode n;
    n.uid = jn.at("uid").get<NodeId>();
    n.role = role_from_string(jn.at("role").get<std::string>());
    if (n.role == Role::EndDevice) {
      if (!jn.contains("attach"))
        throw ConfigError("end device " + std::to_string(n.uid) + " lacks an 'attach' repeater");
      n.attach = jn.at("attach").get<NodeId>();
      n.attach_distance_m = jn.value("attach_distance_m", 10.0);
    }
    n.label = jn.value("label", "");
    t.nodes.push_back(n);
  }
  for (const auto& jl : j.value("links", json::array()))
    t.links.set_distance(jl.at("a").get<NodeId>(), jl.at("b").get<NodeId>(),
                         jl.at("distance_m").get<double>());
  t.links.sensitivity_dbm = j.value("sensitivity_dbm", t.links.sensitivity_dbm);
  t.links.capture_threshold_db = j.value("capture_threshold_db", t.links.capture_threshold_db);
  return t;
}

json topology_to_json(const Topology& t) {
  json j;
  j["name"] = t.name;
  j["sensitivity_dbm"] = t.links.sensitivity_dbm;
  j["capture_threshold_db"] = t.links.capture_threshold_db;
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json jn{{"uid", n.uid}, {"role", to_string(n.role)}};
    if (n.role == Role::EndDevice) {
      jn["attach"] = n.attach;
      jn["attach_distance_m"] = n.attach_distance_m;
    }
    if (!n.label.empty()) jn["label"] = n.label;
    nodes.push_back(jn);
  }
  j["nodes"] = nodes;
  json links = json::array();
  for (const auto& [k, d] : t.links.edges())
    links.push_back({{"a", k.first}, {"b", k.second}, {"distance_m", d}});
  j["links"] = links;
  return j;
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Flooding: return "flooding";
    case Protocol::Routing: return "routing";
    case Protocol::RoutingNoEnergy: return "routing_no_energy";
  }
  return "unknown";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "flooding") return Protocol::Flooding;
  if (s == "routing") return Protocol::Routing;
  if (s == "routing_no_energy") return Protocol::RoutingNoEnergy;
  throw ConfigError("unknown protocol '" + s + "' (flooding|routing|routing_no_energy)");
}

void Scenario::validate() const {
  topology.validate();
  radio.validate();
  path_loss.validate();
  energy.validate();
  if (!(traffic.mean_interval_s > 0.0))
    throw ConfigError("mean traffic interval must be > 0 (zero-width intervals are rejected)");
  if (traffic.payload_bytes <= 0 || traffic.payload_bytes > payload::kMaxPhy)
    throw ConfigError("data payload must be in [1, 255] bytes");
  if (traffic.packets < 0) throw ConfigError("packet budget cannot be negative");
  for (const auto& s : traffic.scripted) {
    if (!topology.contains(s.end_device) || topology.node(s.end_device).role != Role::EndDevice)
      throw ConfigError("scripted packet names unknown end device " + std::to_string(s.end_device));
  }
  if (mac.wait_min_s < 0.0 || mac.wait_max_s < mac.wait_min_s || mac.backoff_min_s < 0.0 ||
      mac.backoff_max_s < mac.backoff_min_s)
    throw ConfigError("MAC wait/backoff bounds are inconsistent");
  if (mac.queue_capacity == 0) throw ConfigError("MAC queue capacity must be positive");
  if (routing.standby_min_s < 0.0 || routing.standby_max_s < routing.standby_min_s)
    throw ConfigError("standby timeout bounds are inconsistent");
  if (!(learning.t1_s > 0.0 && learning.t2_s > learning.t1_s && learning.t3_s > learning.t2_s))
    throw ConfigError("learning windows must satisfy 0 < t1 < t2 < t3");
  if (learning.beacon_rounds < 1) throw ConfigError("at least one beacon round is required");
  if (learning.max_control_payload < payload::kChunkHeader + payload::kChunkRow ||
      learning.max_control_payload > payload::kMaxPhy)
    throw ConfigError("max control payload out of range");
  for (const auto& jam : jams) {
    if (!topology.contains(jam.node) || !topology.contains(jam.trigger_node))
      throw ConfigError("jam references an unknown node");
  }
  if (seeds.empty()) throw ConfigError("scenario needs at least one seed");
}

namespace {

double ms(const json& j, const char* key, double fallback_s) {
  return j.contains(key) ? j.at(key).get<double>() / 1000.0 : fallback_s;
}

PacketKind packet_kind_from_json(const std::string& s) {
  for (auto k : {PacketKind::DataUp, PacketKind::DataDown, PacketKind::Beacon,
                 PacketKind::NeighborReport, PacketKind::RouteTableChunk, PacketKind::RouteSwitch})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown packet kind '" + s + "'");
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    Scenario s;
    s.name = j.value("name", "");
    const auto& jt = j.at("topology");
    s.topology = jt.is_string() ? load_topology(base_dir / jt.get<std::string>())
                                : topology_from_json(jt);

    if (j.contains("end_devices")) {
      auto& nodes = s.topology.nodes;
      nodes.erase(std::remove_if(nodes.begin(), nodes.end(),
                                 [](const auto& n) { return n.role == Role::EndDevice; }),
                  nodes.end());
      for (const auto& je : j.at("end_devices")) {
        TopologyNode n;
        n.uid = je.at("uid").get<NodeId>();
        n.role = Role::EndDevice;
        n.attach = je.at("attach").get<NodeId>();
        n.attach_distance_m = je.value("distance_m", 10.0);
        nodes.push_back(n);
      }
    }

    s.protocol = protocol_from_string(j.value("protocol", "routing"));

    if (j.contains("traffic")) {
      const auto& t = j.at("traffic");
      s.traffic.mean_interval_s = ms(t, "mean_interval_ms", s.traffic.mean_interval_s);
      s.traffic.payload_bytes = t.value("payload_bytes", s.traffic.payload_bytes);
      s.traffic.packets = t.value("packets", s.traffic.packets);
      for (const auto& sp : t.value("scripted", json::array()))
        s.traffic.scripted.push_back({sp.at("ed").get<NodeId>(), sp.at("at_s").get<double>()});
      for (const auto& d : t.value("downlink", json::array()))
        s.traffic.downlink_at_s.push_back(d.at("at_s").get<double>());
    }
    if (j.contains("radio")) {
      const auto& r = j.at("radio");
      s.radio.spreading_factor = r.value("spreading_factor", s.radio.spreading_factor);
      s.radio.bandwidth_hz = r.value("bandwidth_hz", s.radio.bandwidth_hz);
      s.radio.coding_rate_denominator = r.value("coding_rate_denominator", s.radio.coding_rate_denominator);
      s.radio.preamble_symbols = r.value("preamble_symbols", s.radio.preamble_symbols);
      s.radio.explicit_header = r.value("explicit_header", s.radio.explicit_header);
      s.radio.crc_on = r.value("crc_on", s.radio.crc_on);
      s.radio.tx_power_dbm = r.value("tx_power_dbm", s.radio.tx_power_dbm);
    }
    if (j.contains("path_loss")) {
      const auto& p = j.at("path_loss");
      s.path_loss.ref_distance_m = p.value("ref_distance_m", s.path_loss.ref_distance_m);
      s.path_loss.ref_loss_db = p.value("ref_loss_db", s.path_loss.ref_loss_db);
      s.path_loss.exponent = p.value("exponent", s.path_loss.exponent);
      s.path_loss.shadowing_sigma_db = p.value("shadowing_sigma_db", s.path_loss.shadowing_sigma_db);
    }
    if (j.contains("energy")) {
      const auto& e = j.at("energy");
      s.energy.battery_capacity_mah = e.value("battery_capacity_mah", s.energy.battery_capacity_mah);
      s.energy.i_tx_ma = e.value("i_tx_ma", s.energy.i_tx_ma);
      s.energy.i_rx_ma = e.value("i_rx_ma", s.energy.i_rx_ma);
      s.energy.i_idle_ma = e.value("i_idle_ma", s.energy.i_idle_ma);
    }
    if (j.contains("mac")) {
      const auto& m = j.at("mac");
      s.mac.wait_min_s = ms(m, "wait_min_ms", s.mac.wait_min_s);
      s.mac.wait_max_s = ms(m, "wait_max_ms", s.mac.wait_max_s);
      s.mac.backoff_min_s = ms(m, "backoff_min_ms", s.mac.backoff_min_s);
      s.mac.backoff_max_s = ms(m, "backoff_max_ms", s.mac.backoff_max_s);
      s.mac.queue_capacity = m.value("queue_capacity", s.mac.queue_capacity);
      s.mac.dedup_ttl_s = m.value("dedup_ttl_s", s.mac.dedup_ttl_s);
      s.mac.dedup_capacity = m.value("dedup_capacity", s.mac.dedup_capacity);
    }
    if (j.contains("routing")) {
      const auto& r = j.at("routing");
      s.routing.standby = r.value("standby", s.routing.standby);
      s.routing.standby_min_s = ms(r, "standby_min_ms", s.routing.standby_min_s);
      s.routing.standby_max_s = ms(r, "standby_max_ms", s.routing.standby_max_s);
      s.routing.standby_buffer = r.value("standby_buffer", s.routing.standby_buffer);
    }
    if (j.contains("learning")) {
      const auto& l = j.at("learning");
      const auto mode = l.value("mode", std::string("in_sim"));
      if (mode == "in_sim") s.learning.mode = LearningMode::InSim;
      else if (mode == "oracle") s.learning.mode = LearningMode::Oracle;
      else throw ConfigError("unknown learning mode '" + mode + "' (in_sim|oracle)");
      s.learning.beacon_rounds = l.value("beacon_rounds", s.learning.beacon_rounds);
      s.learning.t1_s = l.value("t1_s", s.learning.t1_s);
      s.learning.t2_s = l.value("t2_s", s.learning.t2_s);
      s.learning.t3_s = l.value("t3_s", s.learning.t3_s);
      s.learning.max_control_payload = l.value("max_control_payload", s.learning.max_control_payload);
    }
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("horizon_s")) s.horizon_s = j.at("horizon_s").get<double>();
    for (const auto& jj : j.value("jams", json::array())) {
      Jam jam;
      jam.node = jj.at("node").get<NodeId>();
      jam.trigger_node = jj.at("trigger_node").get<NodeId>();
      jam.trigger_kind = packet_kind_from_json(jj.value("trigger_kind", std::string("DataUp")));
      jam.count = jj.value("count", 1);
      jam.delay_s = ms(jj, "delay_ms", 0.0);
      jam.payload_bytes = jj.value("payload_bytes", payload::kDataDefault);
      s.jams.push_back(jam);
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json(path), path.parent_path());
}

Topology load_topology(const std::filesystem::path& path) {
  try {
    return topology_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace loramesh
