#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "loramesh/core.hpp"

namespace loramesh {

enum class TraceKind : std::uint8_t {
  Generated,
  TxStart,
  TxEnd,
  RxOk,
  RxCollided,
  RxBelowSens,
  DroppedBusyTx,
  StandbyArmed,
  StandbyFired,
  StandbyCancelled,
  StandbyEvicted,
  RouteSwitched,
  DeliveredToGateway,
  DuplicateSuppressed,
  QueueOverflow,
  BatteryLevel,
  NodeDied,
  EnergyFinal,
  PhaseChange,
  EnergyMark,  // consumed mAh at traffic start
};

std::string to_string(TraceKind kind);
TraceKind trace_kind_from_string(const std::string& s);

/// One line of the packet lifecycle trace.
///
/// `peer` is the counterpart node: the transmitter for receptions, the
/// addressee for transmissions, the instruction target for route switches.
/// `value` carries the kind-specific number: airtime for Tx/Rx events,
/// battery level for BatteryLevel, consumed mAh for EnergyFinal.
/// `extra` carries a second number where one is needed (EnergyFinal: tx
/// seconds; Rx events: received power in dBm).
struct TraceEvent {
  double time = 0.0;
  NodeId node = kNoNode;
  PacketId packet = 0;
  TraceKind kind = TraceKind::Generated;
  NodeId peer = kNoNode;
  double value = 0.0;
  double extra = 0.0;
  PacketKind packet_kind = PacketKind::DataUp;
};

std::string to_ndjson_line(const TraceEvent& e);
TraceEvent trace_event_from_json_line(const std::string& line);

void write_ndjson(std::ostream& os, const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> read_ndjson(std::istream& is);

/// FNV-1a 64 over the ndjson rendering.
std::uint64_t trace_digest(const std::vector<TraceEvent>& trace);
std::string hex_digest(std::uint64_t digest);

}  // namespace loramesh
