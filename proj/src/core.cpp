#include "loramesh/core.hpp"

#include <algorithm>
#include <cmath>

namespace loramesh {

std::string to_string(Role role) {
  switch (role) {
    case Role::Gateway: return "gateway";
    case Role::Repeater: return "repeater";
    case Role::EndDevice: return "end_device";
  }
  return "unknown";
}

Role role_from_string(const std::string& s) {
  if (s == "gateway") return Role::Gateway;
  if (s == "repeater") return Role::Repeater;
  if (s == "end_device") return Role::EndDevice;
  throw ConfigError("unknown node role '" + s + "'");
}

std::string to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::DataUp: return "DataUp";
    case PacketKind::DataDown: return "DataDown";
    case PacketKind::Beacon: return "Beacon";
    case PacketKind::NeighborReport: return "NeighborReport";
    case PacketKind::RouteTableChunk: return "RouteTableChunk";
    case PacketKind::RouteSwitch: return "RouteSwitch";
  }
  return "unknown";
}

void RadioConfig::validate() const {
  if (spreading_factor < 7 || spreading_factor > 12)
    throw ConfigError("spreading factor must be in [7, 12]");
  if (bandwidth_hz <= 0) throw ConfigError("bandwidth must be positive");
  if (coding_rate_denominator < 5 || coding_rate_denominator > 8)
    throw ConfigError("coding rate denominator must be in [5, 8]");
  if (preamble_symbols <= 0) throw ConfigError("preamble symbols must be positive");
}

double airtime(const RadioConfig& cfg, int payload_bytes) {
  cfg.validate();
  if (payload_bytes < 0 || payload_bytes > payload::kMaxPhy)
    throw std::invalid_argument("payload of " + std::to_string(payload_bytes) +
                                " B does not fit a LoRa frame");
  const double t_sym = std::ldexp(1.0, cfg.spreading_factor) / cfg.bandwidth_hz;
  const double t_preamble = (cfg.preamble_symbols + 4.25) * t_sym;

  const int sf = cfg.spreading_factor;
  const int header = cfg.explicit_header ? 0 : 1;
  const int crc = cfg.crc_on ? 1 : 0;
  const int numerator = 8 * payload_bytes - 4 * sf + 28 + 16 * crc - 20 * header;
  const int denominator = 4 * sf;  // DE = 0
  // integer ceil of a possibly negative numerator
  int blocks = numerator > 0 ? (numerator + denominator - 1) / denominator : 0;
  const int n_payload = 8 + std::max(blocks * cfg.coding_rate_denominator, 0);
  return t_preamble + n_payload * t_sym;
}

int quantize_battery(double remaining_mah, double capacity_mah) {
  if (!(capacity_mah > 0.0)) throw std::invalid_argument("battery capacity must be positive");
  if (remaining_mah < 0.0) throw std::invalid_argument("remaining charge cannot be negative");
  const double level = std::floor(100.0 * remaining_mah / capacity_mah);
  return static_cast<int>(std::clamp(level, 0.0, 100.0));
}

void EnergyModel::validate() const {
  if (!(battery_capacity_mah > 0.0)) throw ConfigError("battery capacity must be > 0");
  if (!(i_idle_ma > 0.0) || i_rx_ma < i_idle_ma || i_tx_ma < i_rx_ma)
    throw ConfigError("currents must satisfy i_tx >= i_rx >= i_idle > 0");
}

bool Packet::addressed_to(NodeId node) const {
  if (!routed) return true;
  if (next_hop) return *next_hop == node;
  return std::find(forward_set.begin(), forward_set.end(), node) != forward_set.end();
}

}  // namespace loramesh
