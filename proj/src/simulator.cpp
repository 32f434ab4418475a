#include "loramesh/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "loramesh/event_queue.hpp"
#include "loramesh/flooding.hpp"
#include "loramesh/mac.hpp"
#include "loramesh/radio.hpp"
#include "loramesh/rng.hpp"

namespace loramesh {

std::vector<wire::NeighborReport> ideal_reports(const Topology& topology, int max_payload) {
  std::vector<NodeId> infra;
  for (const auto& n : topology.nodes)
    if (n.role != Role::EndDevice) infra.push_back(n.uid);
  std::sort(infra.begin(), infra.end());
  std::vector<wire::NeighborReport> out;
  for (NodeId uid : infra) {
    std::vector<wire::NeighborEntry> entries;
    for (NodeId nb : topology.links.neighbors(uid)) {
      if (!topology.contains(nb) || topology.node(nb).role == Role::EndDevice) continue;
      entries.push_back({nb, *topology.links.distance(uid, nb)});
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.neighbor < b.neighbor; });
    for (auto& r : wire::chunk_report(uid, entries, max_payload)) out.push_back(std::move(r));
  }
  return out;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Signal {
  std::uint64_t tx_id = 0;
  double power = 0.0;
  double max_interferer = kNegInf;
  Channel channel = Channel::Repeater;
  bool decoding = true;
  bool aborted = false;
};

struct RxLink {
  std::size_t idx = 0;
  double distance_m = 0.0;
};

struct Monitor {
  StandbyMonitor info;
  Packet packet;
  std::uint64_t token = 0;
};

struct Node {
  NodeId uid = kNoNode;
  Role role = Role::Repeater;
  NodeId attach = kNoNode;
  bool alive = true;
  bool transmitting = false;
  std::vector<RxLink> links;
  std::vector<Signal> signals;
  RadioState radio_state = RadioState::Idle;
  double state_since = 0.0;
  int traced_level = 100;
  MacState mac;
  RngStream mac_rng, standby_rng, traffic_rng, learning_rng, shadow_rng;
  bool routing = false;
  LearnedTable learned;
  RouteState route;
  std::map<PacketId, Monitor> monitors;
  std::deque<PacketId> monitor_order;
  std::map<PacketId, NodeId> standby_copies;  // queued standby forward -> overheard_from
  std::uint64_t monitor_token = 0;
  std::deque<Packet> ed_backlog;
};

struct ActiveTx {
  std::size_t node = 0;
  Packet packet;
  Channel channel = Channel::Repeater;
  double airtime = 0.0;
  std::vector<std::size_t> receivers;
};

class Engine {
 public:
  Engine(const Scenario& sc, std::uint64_t seed) : sc_(sc), jams_(sc.jams) {
    result_.seed = seed;
    result_.ledger = EnergyLedger(sc.energy);
    const auto& topo = sc.topology;
    std::vector<TopologyNode> sorted = topo.nodes;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.uid < b.uid; });
    for (const auto& tn : sorted) {
      Node n;
      n.uid = tn.uid;
      n.role = tn.role;
      n.attach = tn.attach;
      n.mac.dedup = DedupCache(sc.mac.dedup_ttl_s, sc.mac.dedup_capacity);
      n.mac.channel = tn.role == Role::EndDevice ? Channel::EndDevice : Channel::Repeater;
      n.mac_rng = RngStream(seed, tn.uid, StreamPurpose::MacWait);
      n.standby_rng = RngStream(seed, tn.uid, StreamPurpose::Standby);
      n.traffic_rng = RngStream(seed, tn.uid, StreamPurpose::Traffic);
      n.learning_rng = RngStream(seed, tn.uid, StreamPurpose::Learning);
      n.shadow_rng = RngStream(seed, tn.uid, StreamPurpose::Shadowing);
      n.learned.self = tn.uid;
      n.route.self = tn.uid;
      index_[tn.uid] = nodes_.size();
      result_.roles[tn.uid] = tn.role;
      if (tn.role != Role::EndDevice) result_.ledger.add_node(tn.uid, tn.role == Role::Gateway);
      nodes_.push_back(std::move(n));
    }
    for (auto& n : nodes_) {
      if (n.role == Role::EndDevice) {
        n.links.push_back({index_.at(n.attach), topo.node(n.uid).attach_distance_m});
      }
      for (NodeId nb : topo.links.neighbors(n.uid)) {
        if (!index_.count(nb)) continue;
        const Node& other = nodes_[index_.at(nb)];
        if (other.role == Role::EndDevice) continue;
        if (n.role == Role::EndDevice && nb == n.attach) continue;
        n.links.push_back({index_.at(nb), *topo.links.distance(n.uid, nb)});
      }
    }
  }

  RunResult run() {
    if (!sc_.uses_routing()) {
      at(0.0, [this] { start_operation(); });
    } else if (sc_.learning.mode == LearningMode::Oracle) {
      at(0.0, [this] { oracle_learning(); });
    } else {
      at(0.0, [this] { start_learning(); });
    }
    while (!q_.empty()) {
      if (sc_.horizon_s && q_.next_time() > *sc_.horizon_s) {
        q_.advance_to(*sc_.horizon_s);
        result_.hit_horizon = true;
        break;
      }
      q_.step();
    }
    finalize();
    return std::move(result_);
  }

 private:
  double now() const { return q_.now(); }

  template <class F>
  void at(double t, F f) {
    q_.schedule(t, std::function<void()>(std::move(f)));
  }

  PacketId new_packet_id() { return next_packet_id_++; }

  void emit(TraceKind kind, NodeId node, const Packet* p, NodeId peer = kNoNode, double value = 0.0,
            double extra = 0.0) {
    TraceEvent e;
    e.time = now();
    e.node = node;
    e.kind = kind;
    e.peer = peer;
    e.value = value;
    e.extra = extra;
    if (p) {
      e.packet = p->id;
      e.packet_kind = p->kind;
    }
    result_.trace.push_back(e);
  }

  bool is_gateway(NodeId uid) const {
    auto it = index_.find(uid);
    return it != index_.end() && nodes_[it->second].role == Role::Gateway;
  }

  // ---- energy ----

  void sync(Node& n) {
    auto& ledger = result_.ledger;
    if (!ledger.has(n.uid)) return;
    const double dt = now() - n.state_since;
    if (dt > 0.0) ledger.charge_interval(n.uid, n.radio_state, n.state_since, dt);
    n.state_since = now();
    const NodeEnergy& e = ledger.at(n.uid);
    if (e.level < n.traced_level) {
      for (const auto& [t, lvl] : e.history)
        if (lvl < n.traced_level) emit(TraceKind::BatteryLevel, n.uid, nullptr, kNoNode, lvl, t);
      n.traced_level = e.level;
    }
    n.route.own_level = e.level;
    if (e.dead && n.alive) kill(n, e.death_time);
  }

  void refresh_state(Node& n) {
    sync(n);
    RadioState s = RadioState::Idle;
    if (n.transmitting) {
      s = RadioState::Tx;
    } else if (std::any_of(n.signals.begin(), n.signals.end(),
                           [](const Signal& sig) { return sig.decoding && !sig.aborted; })) {
      s = RadioState::Rx;
    }
    n.radio_state = s;
  }

  void kill(Node& n, double death_time) {
    n.alive = false;
    emit(TraceKind::NodeDied, n.uid, nullptr, kNoNode, death_time);
    n.mac.queue.clear();
    n.mac.mode = MacMode::Idle;
    ++n.mac.token;
    n.monitors.clear();
    n.monitor_order.clear();
    n.standby_copies.clear();
    for (auto& s : n.signals) s.decoding = false;
  }

  // ---- physical layer ----

  bool begin_tx(std::size_t i, Packet p, Channel ch) {
    Node& n = nodes_[i];
    sync(n);
    if (!n.alive) return false;
    p.current_tx = n.uid;
    n.transmitting = true;
    // Half duplex: one radio serves both channels.
    for (auto& s : n.signals)
      if (s.decoding) s.aborted = true;
    refresh_state(n);
    const double air = airtime(sc_.radio, p.payload_bytes);
    const std::uint64_t id = next_tx_id_++;
    emit(TraceKind::TxStart, n.uid, &p, p.next_hop.value_or(kNoNode), air);

    ActiveTx tx{i, p, ch, air, {}};
    const auto& model = sc_.path_loss;
    const double sens = sc_.topology.links.sensitivity_dbm;
    for (const auto& link : n.links) {
      Node& r = nodes_[link.idx];
      sync(r);
      if (!r.alive) continue;
      const double shadow =
          model.shadowing_sigma_db > 0.0 ? n.shadow_rng.normal(0.0, model.shadowing_sigma_db) : 0.0;
      const double pw = sc_.radio.tx_power_dbm - path_loss(model, link.distance_m, shadow).loss_db;
      if (pw < sens) {
        emit(TraceKind::RxBelowSens, r.uid, &p, n.uid, air, pw);
        continue;
      }
      const bool blocked = r.transmitting;
      Signal s;
      s.tx_id = id;
      s.power = pw;
      s.channel = ch;
      s.decoding = !blocked;
      for (auto& other : r.signals) {
        if (other.channel != ch) continue;
        other.max_interferer = std::max(other.max_interferer, pw);
        s.max_interferer = std::max(s.max_interferer, other.power);
      }
      if (blocked) emit(TraceKind::DroppedBusyTx, r.uid, &p, n.uid, air, pw);
      r.signals.push_back(s);
      tx.receivers.push_back(link.idx);
      refresh_state(r);
    }
    if (!p.interference) trigger_jams(n.uid, p.kind);
    active_.emplace(id, std::move(tx));
    at(now() + air, [this, id] { end_tx(id); });
    return true;
  }

  void end_tx(std::uint64_t id) {
    ActiveTx tx = std::move(active_.at(id));
    active_.erase(id);
    Node& n = nodes_[tx.node];
    n.transmitting = false;
    refresh_state(n);
    const Packet& p = tx.packet;
    emit(TraceKind::TxEnd, n.uid, &p, p.next_hop.value_or(kNoNode), tx.airtime);
    const double thr = sc_.topology.links.capture_threshold_db;
    for (std::size_t ri : tx.receivers) {
      Node& r = nodes_[ri];
      auto it = std::find_if(r.signals.begin(), r.signals.end(),
                             [&](const Signal& s) { return s.tx_id == id; });
      if (it == r.signals.end()) continue;
      const Signal s = *it;
      r.signals.erase(it);
      refresh_state(r);
      if (!r.alive || !s.decoding) continue;
      if (s.aborted) {
        emit(TraceKind::DroppedBusyTx, r.uid, &p, n.uid, tx.airtime, s.power);
        continue;
      }
      const bool ok = s.power - s.max_interferer >= thr;
      emit(ok ? TraceKind::RxOk : TraceKind::RxCollided, r.uid, &p, n.uid, tx.airtime, s.power);
      if (ok && !p.interference) deliver(ri, p, s.power);
    }
    if (n.role == Role::EndDevice) {
      if (!n.ed_backlog.empty()) {
        Packet next = std::move(n.ed_backlog.front());
        n.ed_backlog.pop_front();
        begin_tx(tx.node, std::move(next), Channel::EndDevice);
      }
      return;
    }
    if (n.mac.mode == MacMode::Transmitting) n.mac.mode = MacMode::Idle;
    kick_mac(tx.node);
  }

  void trigger_jams(NodeId node, PacketKind kind) {
    for (std::size_t j = 0; j < jams_.size(); ++j) {
      Jam& jam = jams_[j];
      if (jam.count <= 0 || jam.trigger_node != node || jam.trigger_kind != kind) continue;
      --jam.count;
      at(now() + jam.delay_s, [this, j] { jam_tx(j); });
    }
  }

  void jam_tx(std::size_t j) {
    const Jam& jam = jams_[j];
    const std::size_t idx = index_.at(jam.node);
    Node& n = nodes_[idx];
    if (!n.alive || n.transmitting) return;
    Packet p;
    p.id = new_packet_id();
    p.kind = PacketKind::Beacon;
    p.origin = n.uid;
    p.payload_bytes = jam.payload_bytes;
    p.created_at = now();
    p.interference = true;
    begin_tx(idx, std::move(p), Channel::Repeater);
  }

  // ---- MAC ----

  void enqueue(std::size_t i, Packet p) {
    Node& n = nodes_[i];
    if (!n.alive) return;
    auto dropped = n.mac.enqueue(std::move(p), sc_.mac.queue_capacity);
    if (dropped) {
      emit(TraceKind::QueueOverflow, n.uid, &*dropped);
      n.standby_copies.erase(dropped->id);
    }
    kick_mac(i);
  }

  void kick_mac(std::size_t i) {
    Node& n = nodes_[i];
    if (!n.alive || n.transmitting) return;
    const MacAction a = schedule_tx(n.mac, now(), sc_.mac, n.mac_rng);
    if (a.kind != MacAction::Kind::WaitUntil) return;
    const std::uint64_t token = n.mac.token;
    at(a.at, [this, i, token] { sense(i, token); });
  }

  void sense(std::size_t i, std::uint64_t token) {
    Node& n = nodes_[i];
    if (token != n.mac.token || !n.alive) return;
    const bool busy =
        n.transmitting || std::any_of(n.signals.begin(), n.signals.end(), [](const Signal& s) {
          return s.channel == Channel::Repeater;
        });
    const MacAction a = on_sense(n.mac, now(), busy, sc_.mac, n.mac_rng);
    if (a.kind == MacAction::Kind::WaitUntil) {
      const std::uint64_t next = n.mac.token;
      at(a.at, [this, i, next] { sense(i, next); });
    } else if (a.kind == MacAction::Kind::Transmit) {
      Packet p = std::move(n.mac.queue.front());
      n.mac.queue.pop_front();
      n.standby_copies.erase(p.id);
      if (n.routing && sc_.energy_aware() && n.role == Role::Repeater &&
          (p.kind == PacketKind::DataUp || p.kind == PacketKind::DataDown)) {
        sync(n);
        p.battery_piggyback = take_piggyback(n.route);
      }
      if (!begin_tx(i, std::move(p), Channel::Repeater)) n.mac.mode = MacMode::Idle;
    }
  }

  // ---- protocol ----

  Delivery flood(std::size_t i, const Packet& p) {
    Node& r = nodes_[i];
    const Delivery d = on_rx_complete(r.mac, p, now());
    if (auto out = flood_on_deliver(r.role, r.uid, p, d)) {
      r.mac.dedup.insert(p.id, now());
      enqueue(i, std::move(*out));
    }
    return d;
  }

  void deliver(std::size_t i, const Packet& p, double power) {
    Node& r = nodes_[i];
    if (r.routing && p.battery_piggyback) r.route.neighbor_levels[p.current_tx] = *p.battery_piggyback;
    switch (p.kind) {
      case PacketKind::Beacon:
        if (phase_ < Phase::Traffic && r.role != Role::EndDevice)
          record_beacon(r.learned, p.current_tx, power, sc_.radio.tx_power_dbm, sc_.path_loss);
        if (r.role == Role::Repeater) flood(i, p);
        break;
      case PacketKind::NeighborReport:
        if (r.role == Role::Gateway) {
          if (server_seen_.insert(p.id).second)
            result_.reports.push_back(wire::decode_neighbor_report(p.body));
        } else if (r.role == Role::Repeater) {
          flood(i, p);
        }
        break;
      case PacketKind::RouteTableChunk:
        if (r.role == Role::Repeater) {
          if (phase_ < Phase::Traffic) install_routing(r.learned, wire::decode_route_chunk(p.body));
          flood(i, p);
        }
        break;
      case PacketKind::RouteSwitch:
        on_route_switch(i, p);
        break;
      case PacketKind::DataUp:
        on_data(i, p, Direction::Up);
        break;
      case PacketKind::DataDown:
        on_data(i, p, Direction::Down);
        break;
    }
  }

  void on_route_switch(std::size_t i, const Packet& p) {
    Node& r = nodes_[i];
    if (!r.routing || !p.addressed_to(r.uid) || p.body.size() < 4) return;
    const Direction dir = p.body[0] == 0 ? Direction::Up : Direction::Down;
    const NodeId replaced = wire::decode_uid(static_cast<std::uint16_t>(p.body[1] << 8 | p.body[2]));
    if (apply_route_switch(r.route, p.current_tx, replaced, dir))
      emit(TraceKind::RouteSwitched, r.uid, &p, p.current_tx, p.body[3], 1.0);
  }

  Packet forward_copy(const Node& r, const Packet& p, Direction dir) const {
    Packet out = p;
    out.current_tx = r.uid;
    out.routed = true;
    out.battery_piggyback.reset();
    out.hop_count = p.hop_count + 1;
    out.next_hop.reset();
    out.forward_set.clear();
    if (dir == Direction::Up) {
      out.next_hop = r.route.upstream_current;
    } else {
      out.forward_set.assign(r.route.downstream_current.begin(), r.route.downstream_current.end());
    }
    return out;
  }

  void on_data(std::size_t i, const Packet& p, Direction dir) {
    Node& r = nodes_[i];
    if (r.role == Role::Gateway) {
      if (dir != Direction::Up) return;
      if (delivered_.insert(p.id).second) {
        emit(TraceKind::DeliveredToGateway, r.uid, &p, p.current_tx, now() - p.created_at,
             p.hop_count);
      } else {
        emit(TraceKind::DuplicateSuppressed, r.uid, &p, p.current_tx);
      }
      return;
    }
    if (r.role != Role::Repeater) return;
    if (!r.routing) {
      if (flood(i, p) == Delivery::Duplicate)
        emit(TraceKind::DuplicateSuppressed, r.uid, &p, p.current_tx);
      return;
    }
    observe_forward(i, p);
    if (p.addressed_to(r.uid)) {
      if (r.mac.dedup.contains(p.id, now())) {
        emit(TraceKind::DuplicateSuppressed, r.uid, &p, p.current_tx);
        return;
      }
      r.mac.dedup.insert(p.id, now());
      if (r.monitors.erase(p.id)) emit(TraceKind::StandbyCancelled, r.uid, &p, p.current_tx);
      enqueue(i, forward_copy(r, p, dir));
      return;
    }
    maybe_arm(i, p, dir);
  }

  /// Standby bookkeeping for any reception of a data frame.
  void observe_forward(std::size_t i, const Packet& p) {
    Node& r = nodes_[i];
    auto it = r.monitors.find(p.id);
    if (it != r.monitors.end() && p.current_tx != it->second.info.overheard_from) {
      const Monitor m = it->second;
      r.monitors.erase(it);
      emit(TraceKind::StandbyCancelled, r.uid, &p, p.current_tx);
      if (sc_.energy_aware() && p.current_tx == m.info.intended_next && p.battery_piggyback) {
        const SwitchCase c = evaluate_switch(r.route, m.info, *p.battery_piggyback);
        if (c != SwitchCase::None) issue_switch(i, m, c);
      }
    }
    auto sc = r.standby_copies.find(p.id);
    if (sc != r.standby_copies.end() && p.current_tx != sc->second) {
      if (r.mac.remove(p.id)) emit(TraceKind::StandbyCancelled, r.uid, &p, p.current_tx, 0.0, 1.0);
      r.standby_copies.erase(sc);
    }
  }

  void issue_switch(std::size_t i, const Monitor& m, SwitchCase c) {
    Node& r = nodes_[i];
    const int case_no = c == SwitchCase::Case1 ? 1 : 2;
    Packet sw;
    sw.id = new_packet_id();
    sw.kind = PacketKind::RouteSwitch;
    sw.origin = r.uid;
    sw.routed = true;
    sw.next_hop = m.info.overheard_from;
    sw.payload_bytes = payload::kRouteSwitch;
    sw.created_at = now();
    const std::uint16_t replaced = wire::encode_uid(m.info.intended_next);
    sw.body = {static_cast<std::uint8_t>(m.info.direction == Direction::Up ? 0 : 1),
               static_cast<std::uint8_t>(replaced >> 8), static_cast<std::uint8_t>(replaced & 0xFF),
               static_cast<std::uint8_t>(case_no)};
    if (c == SwitchCase::Case1) {
      if (m.info.direction == Direction::Up)
        r.route.upstream_current = r.route.upstream_original;
      else
        r.route.downstream_current = r.route.downstream_original;
    }
    emit(TraceKind::RouteSwitched, r.uid, &sw, m.info.overheard_from, case_no, 0.0);
    enqueue(i, std::move(sw));
  }

  void maybe_arm(std::size_t i, const Packet& p, Direction dir) {
    Node& r = nodes_[i];
    if (!sc_.routing.standby || !p.routed) return;
    if (r.monitors.count(p.id) || r.standby_copies.count(p.id) || r.mac.dedup.contains(p.id, now()))
      return;
    NodeId addressee = kNoNode;
    if (dir == Direction::Up) {
      if (!p.next_hop) return;
      if (should_arm_standby(r.route, p.current_tx, *p.next_hop, dir, is_gateway(*p.next_hop)))
        addressee = *p.next_hop;
    } else {
      for (NodeId m : p.forward_set) {
        if (should_arm_standby(r.route, p.current_tx, m, dir, is_gateway(m))) {
          addressee = m;
          break;
        }
      }
    }
    if (addressee == kNoNode) return;
    while (r.monitors.size() >= sc_.routing.standby_buffer && !r.monitor_order.empty()) {
      const PacketId oldest = r.monitor_order.front();
      r.monitor_order.pop_front();
      auto it = r.monitors.find(oldest);
      if (it == r.monitors.end()) continue;
      emit(TraceKind::StandbyEvicted, r.uid, &it->second.packet, it->second.info.overheard_from);
      r.monitors.erase(it);
    }
    const double deadline =
        now() + r.standby_rng.uniform(sc_.routing.standby_min_s, sc_.routing.standby_max_s);
    const std::uint64_t token = ++r.monitor_token;
    r.monitors[p.id] = Monitor{{p.id, p.current_tx, addressee, deadline, dir}, p, token};
    r.monitor_order.push_back(p.id);
    emit(TraceKind::StandbyArmed, r.uid, &p, p.current_tx, deadline, addressee);
    const PacketId id = p.id;
    at(deadline, [this, i, id, token] { fire(i, id, token); });
  }

  void fire(std::size_t i, PacketId id, std::uint64_t token) {
    Node& r = nodes_[i];
    auto it = r.monitors.find(id);
    if (it == r.monitors.end() || it->second.token != token) return;
    const Monitor m = std::move(it->second);
    r.monitors.erase(it);
    if (!r.alive || !r.routing) return;
    emit(TraceKind::StandbyFired, r.uid, &m.packet, m.info.overheard_from);
    if (r.mac.dedup.contains(id, now())) return;
    r.mac.dedup.insert(id, now());
    r.standby_copies[id] = m.info.overheard_from;
    enqueue(i, forward_copy(r, m.packet, m.info.direction));
  }

  // ---- learning ----

  void phase_change(Phase p) {
    phase_ = p;
    emit(TraceKind::PhaseChange, kNoNode, nullptr, kNoNode, static_cast<int>(p));
  }

  std::vector<std::size_t> indices(Role role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].role == role) out.push_back(i);
    return out;
  }

  void originate(std::size_t i, PacketKind kind, int payload_bytes, std::vector<std::uint8_t> body,
                 PacketId id) {
    Node& n = nodes_[i];
    Packet p;
    p.id = id;
    p.kind = kind;
    p.origin = n.uid;
    p.payload_bytes = payload_bytes;
    p.created_at = now();
    p.body = std::move(body);
    n.mac.dedup.insert(p.id, now());
    enqueue(i, std::move(p));
  }

  void start_learning() {
    phase_change(Phase::Beacons);
    const auto& L = sc_.learning;
    const double spacing = L.t1_s / std::max(L.beacon_rounds, 1);
    for (std::size_t g : indices(Role::Gateway)) {
      for (int k = 0; k < L.beacon_rounds; ++k) {
        const double t = (k + 0.5 * nodes_[g].learning_rng.next_unit()) * spacing;
        at(t, [this, g] {
          originate(g, PacketKind::Beacon, payload::kBeacon, {}, new_packet_id());
        });
      }
    }
    at(L.t1_s, [this] { start_reports(); });
    at(L.t2_s, [this] { start_dissemination(); });
    at(L.t3_s, [this] { start_operation(); });
  }

  void start_reports() {
    phase_change(Phase::Reports);
    const auto& L = sc_.learning;
    for (std::size_t g : indices(Role::Gateway)) {
      auto out = emit_neighbor_report(nodes_[g].learned, L.max_control_payload);
      for (auto& c : out.chunks) result_.reports.push_back(std::move(c));
      for (auto& w : out.warnings) result_.warnings.push_back(std::move(w));
    }
    for (std::size_t r : indices(Role::Repeater)) {
      const double t = L.t1_s + nodes_[r].learning_rng.uniform(0.0, 0.6 * (L.t2_s - L.t1_s));
      at(t, [this, r] {
        if (!nodes_[r].alive) return;
        auto out = emit_neighbor_report(nodes_[r].learned, sc_.learning.max_control_payload);
        for (auto& w : out.warnings) result_.warnings.push_back(std::move(w));
        for (const auto& c : out.chunks) {
          auto body = wire::encode(c);
          const int size = static_cast<int>(body.size());
          originate(r, PacketKind::NeighborReport, size, std::move(body), new_packet_id());
        }
      });
    }
  }

  void build_plan() {
    std::vector<NodeId> gws;
    for (std::size_t g : indices(Role::Gateway)) gws.push_back(nodes_[g].uid);
    result_.plan = aggregate(gws, result_.reports);
    plan(result_.plan);
    for (const auto& w : result_.plan.warnings) result_.warnings.push_back(w);
  }

  void start_dissemination() {
    phase_change(Phase::Dissemination);
    build_plan();
    const auto chunks = emit_chunks(result_.plan, sc_.learning.max_control_payload);
    const auto& L = sc_.learning;
    const double spacing = (L.t3_s - L.t2_s) / (L.beacon_rounds + 1);
    for (std::size_t g : indices(Role::Gateway)) {
      for (int k = 0; k < L.beacon_rounds; ++k) {
        for (const auto& c : chunks) {
          const double t = L.t2_s + (k + 0.5 * nodes_[g].learning_rng.next_unit()) * spacing;
          auto body = wire::encode(c);
          at(t, [this, g, body = std::move(body)]() mutable {
            const int size = static_cast<int>(body.size());
            originate(g, PacketKind::RouteTableChunk, size, std::move(body), new_packet_id());
          });
        }
      }
    }
  }

  void oracle_learning() {
    const auto& topo = sc_.topology;
    result_.reports = ideal_reports(topo, sc_.learning.max_control_payload);
    build_plan();
    const auto chunks = emit_chunks(result_.plan, sc_.learning.max_control_payload);
    for (auto& n : nodes_) {
      if (n.role == Role::EndDevice) continue;
      for (NodeId nb : topo.links.neighbors(n.uid)) {
        if (!index_.count(nb) || nodes_[index_.at(nb)].role == Role::EndDevice) continue;
        auto& rec = n.learned.neighbors[nb];
        rec.neighbor = nb;
        rec.samples = 1;
        rec.est_distance_m = *topo.links.distance(n.uid, nb);
        rec.avg_prx_dbm = sc_.radio.tx_power_dbm - path_loss(sc_.path_loss, rec.est_distance_m).loss_db;
      }
      if (n.role == Role::Repeater)
        for (const auto& c : chunks) install_routing(n.learned, c);
    }
    start_operation();
  }

  void start_operation() {
    if (sc_.uses_routing()) {
      for (auto& n : nodes_) {
        if (n.role == Role::Repeater) {
          if (n.learned.has_route() && n.learned.upstream != kNoNode) {
            n.routing = true;
            sync(n);
            const int level = n.route.own_level;
            n.route = RouteState::from_learned(n.learned);
            n.route.own_level = level;
            result_.routing_nodes.push_back(n.uid);
          } else {
            result_.warnings.push_back("repeater " + std::to_string(n.uid) +
                                       " has no route; falling back to flooding");
          }
        } else if (n.role == Role::Gateway) {
          n.routing = true;
          n.route.own_value = 0.0;
          auto vit = result_.plan.vertices.find(n.uid);
          if (vit != result_.plan.vertices.end()) {
            n.route.downstream_original.insert(vit->second.downstream.begin(),
                                               vit->second.downstream.end());
            n.route.downstream_current = n.route.downstream_original;
            for (const auto& [nb, w] : result_.plan.adjacent(n.uid)) {
              auto nv = result_.plan.vertices.find(nb);
              if (nv != result_.plan.vertices.end() && std::isfinite(nv->second.distance_value))
                n.route.neighbor_values[nb] = nv->second.distance_value;
            }
          }
        }
      }
    }
    for (const auto& n : nodes_)
      if (n.role != Role::EndDevice) result_.learned[n.uid] = n.learned;
    phase_change(Phase::Traffic);
    result_.traffic_start = now();
    for (auto& n : nodes_) {
      if (!result_.ledger.has(n.uid)) continue;
      sync(n);
      emit(TraceKind::EnergyMark, n.uid, nullptr, kNoNode, result_.ledger.at(n.uid).consumed_mah(),
           result_.ledger.at(n.uid).tx_s);
    }
    start_traffic();
  }

  // ---- traffic ----

  void start_traffic() {
    const auto& T = sc_.traffic;
    const double t0 = now();
    if (!T.scripted.empty()) {
      for (const auto& s : T.scripted) {
        const std::size_t e = index_.at(s.end_device);
        at(t0 + s.at_s, [this, e] { generate(e); });
      }
    } else if (T.packets > 0) {
      for (std::size_t e : indices(Role::EndDevice)) {
        at(t0 + nodes_[e].traffic_rng.uniform(0.0, 2.0 * T.mean_interval_s),
           [this, e] { random_generation(e); });
      }
    }
    for (double d : T.downlink_at_s) at(t0 + d, [this] { originate_downlink(); });
  }

  void random_generation(std::size_t e) {
    if (generated_ >= sc_.traffic.packets) return;
    ++generated_;
    generate(e);
    at(now() + nodes_[e].traffic_rng.uniform(0.0, 2.0 * sc_.traffic.mean_interval_s),
       [this, e] { random_generation(e); });
  }

  void generate(std::size_t e) {
    Node& n = nodes_[e];
    Packet p;
    p.id = new_packet_id();
    p.kind = PacketKind::DataUp;
    p.origin = n.uid;
    p.payload_bytes = sc_.traffic.payload_bytes;
    p.created_at = now();
    emit(TraceKind::Generated, n.uid, &p, n.attach);
    if (n.transmitting)
      n.ed_backlog.push_back(std::move(p));
    else
      begin_tx(e, std::move(p), Channel::EndDevice);
  }

  void originate_downlink() {
    const PacketId id = new_packet_id();
    for (std::size_t g : indices(Role::Gateway)) {
      Node& n = nodes_[g];
      Packet p;
      p.id = id;
      p.kind = PacketKind::DataDown;
      p.origin = n.uid;
      p.payload_bytes = sc_.traffic.payload_bytes;
      p.created_at = now();
      if (n.routing) {
        p.routed = true;
        p.forward_set.assign(n.route.downstream_current.begin(), n.route.downstream_current.end());
      }
      emit(TraceKind::Generated, n.uid, &p);
      n.mac.dedup.insert(id, now());
      enqueue(g, std::move(p));
    }
  }

  void finalize() {
    result_.end_time = now();
    for (auto& n : nodes_) {
      if (!result_.ledger.has(n.uid)) continue;
      sync(n);
      const auto& e = result_.ledger.at(n.uid);
      emit(TraceKind::EnergyFinal, n.uid, nullptr, kNoNode, e.consumed_mah(), e.tx_s);
      if (n.routing) result_.routes[n.uid] = n.route;
    }
    if (result_.learned.empty())
      for (const auto& n : nodes_)
        if (n.role != Role::EndDevice) result_.learned[n.uid] = n.learned;
  }

  const Scenario& sc_;
  std::vector<Jam> jams_;
  RunResult result_;
  EventQueue q_;
  std::vector<Node> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::unordered_map<std::uint64_t, ActiveTx> active_;
  std::set<PacketId> server_seen_;
  std::set<PacketId> delivered_;
  Phase phase_ = Phase::Beacons;
  PacketId next_packet_id_ = 1;
  std::uint64_t next_tx_id_ = 1;
  std::int64_t generated_ = 0;
};

}  // namespace

RunResult simulate(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  Engine engine(scenario, seed);
  return engine.run();
}

}  // namespace loramesh
