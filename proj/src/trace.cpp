#include "loramesh/trace.hpp"

#include <array>
#include <cstdio>
#include <istream>
#include <ostream>
#include <utility>

#include <json.hpp>

namespace loramesh {

namespace {

constexpr std::array<std::pair<TraceKind, const char*>, 20> kNames{{
    {TraceKind::Generated, "Generated"},
    {TraceKind::TxStart, "TxStart"},
    {TraceKind::TxEnd, "TxEnd"},
    {TraceKind::RxOk, "RxOk"},
    {TraceKind::RxCollided, "RxCollided"},
    {TraceKind::RxBelowSens, "RxBelowSens"},
    {TraceKind::DroppedBusyTx, "DroppedBusyTx"},
    {TraceKind::StandbyArmed, "StandbyArmed"},
    {TraceKind::StandbyFired, "StandbyFired"},
    {TraceKind::StandbyCancelled, "StandbyCancelled"},
    {TraceKind::StandbyEvicted, "StandbyEvicted"},
    {TraceKind::RouteSwitched, "RouteSwitched"},
    {TraceKind::DeliveredToGateway, "DeliveredToGateway"},
    {TraceKind::DuplicateSuppressed, "DuplicateSuppressed"},
    {TraceKind::QueueOverflow, "QueueOverflow"},
    {TraceKind::BatteryLevel, "BatteryLevel"},
    {TraceKind::NodeDied, "NodeDied"},
    {TraceKind::EnergyFinal, "EnergyFinal"},
    {TraceKind::PhaseChange, "PhaseChange"},
    {TraceKind::EnergyMark, "EnergyMark"},
}};

PacketKind packet_kind_from_string(const std::string& s) {
  for (auto k : {PacketKind::DataUp, PacketKind::DataDown, PacketKind::Beacon,
                 PacketKind::NeighborReport, PacketKind::RouteTableChunk,
                 PacketKind::RouteSwitch}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown packet kind '" + s + "'");
}

}  // namespace

std::string to_string(TraceKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "Unknown";
}

TraceKind trace_kind_from_string(const std::string& s) {
  for (const auto& [k, name] : kNames)
    if (s == name) return k;
  throw std::invalid_argument("unknown trace kind '" + s + "'");
}

std::string to_ndjson_line(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["t"] = e.time;
  j["node"] = e.node;
  j["pkt"] = e.packet;
  j["kind"] = to_string(e.kind);
  j["pkind"] = to_string(e.packet_kind);
  if (e.peer != kNoNode) j["peer"] = e.peer;
  if (e.value != 0.0) j["v"] = e.value;
  if (e.extra != 0.0) j["x"] = e.extra;
  return j.dump();
}

TraceEvent trace_event_from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TraceEvent e;
  e.time = j.at("t").get<double>();
  e.node = j.at("node").get<NodeId>();
  e.packet = j.at("pkt").get<PacketId>();
  e.kind = trace_kind_from_string(j.at("kind").get<std::string>());
  e.packet_kind = packet_kind_from_string(j.at("pkind").get<std::string>());
  e.peer = j.value("peer", kNoNode);
  e.value = j.value("v", 0.0);
  e.extra = j.value("x", 0.0);
  return e;
}

void write_ndjson(std::ostream& os, const std::vector<TraceEvent>& trace) {
  for (const auto& e : trace) os << to_ndjson_line(e) << '\n';
}

std::vector<TraceEvent> read_ndjson(std::istream& is) {
  std::vector<TraceEvent> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(trace_event_from_json_line(line));
  }
  return out;
}

std::uint64_t trace_digest(const std::vector<TraceEvent>& trace) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const auto& e : trace) {
    for (unsigned char c : to_ndjson_line(e)) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    h ^= '\n';
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace loramesh
