#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loramesh {

/// Unique identifier of a gateway, repeater or end device. Gateways and
/// repeaters share one UID space.
using NodeId = std::uint32_t;
using PacketId = std::uint64_t;

inline constexpr NodeId kNoNode = 0xFFFFFFFFu;

/// Raised for invalid scenario, topology or parameter input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { Gateway, Repeater, EndDevice };

std::string to_string(Role role);
Role role_from_string(const std::string& s);

/// Repeaters talk on one channel, end devices on another.
enum class Channel : std::uint8_t { Repeater = 0, EndDevice = 1 };

struct RadioConfig {
  int spreading_factor = 7;
  int bandwidth_hz = 500'000;
  int coding_rate_denominator = 5;  // CR 4/x
  int preamble_symbols = 8;
  bool explicit_header = true;
  bool crc_on = true;
  double tx_power_dbm = 14.0;

  void validate() const;
};

/// Time on air in seconds (Semtech SX127x formula, no low-data-rate
/// optimization). Throws std::invalid_argument for payloads over 255 B.
double airtime(const RadioConfig& cfg, int payload_bytes);

/// floor(100 * remaining / capacity), clamped to [0, 100].
int quantize_battery(double remaining_mah, double capacity_mah);

struct EnergyModel {
  double battery_capacity_mah = 100.0;
  double i_tx_ma = 500.0;
  double i_rx_ma = 50.0;
  double i_idle_ma = 1.0;

  void validate() const;
};

enum class PacketKind : std::uint8_t {
  DataUp,
  DataDown,
  Beacon,
  NeighborReport,
  RouteTableChunk,
  RouteSwitch,
};

std::string to_string(PacketKind kind);

enum class Direction : std::uint8_t { Up, Down };

/// A frame as it exists on air. `current_tx` and the addressing fields are
/// rewritten at every hop; everything else travels with the packet.
struct Packet {
  PacketId id = 0;
  PacketKind kind = PacketKind::DataUp;
  NodeId origin = kNoNode;
  NodeId current_tx = kNoNode;
  /// False for broadcasts (flooding, ED uplink): every receiver is an
  /// addressee. True when next_hop / forward_set name the addressees.
  bool routed = false;
  std::optional<NodeId> next_hop;       // uplink / unicast addressee
  std::vector<NodeId> forward_set;      // downlink forwarding set
  int payload_bytes = 20;
  std::optional<int> battery_piggyback;  // 0..100
  int hop_count = 0;
  double created_at = 0.0;
  /// Control payload (reports, table chunks). Empty for data frames.
  std::vector<std::uint8_t> body;
  /// Scripted interference: occupies the channel, never delivered.
  bool interference = false;

  bool addressed_to(NodeId node) const;
};

namespace payload {
inline constexpr int kMaxPhy = 255;
inline constexpr int kBeacon = 8;
inline constexpr int kRouteSwitch = 8;
inline constexpr int kReportHeader = 4;
inline constexpr int kReportEntry = 4;
inline constexpr int kChunkHeader = 4;
inline constexpr int kChunkRow = 6;
inline constexpr int kChunkPair = 4;
inline constexpr int kDataDefault = 20;
}  // namespace payload

}  // namespace loramesh
