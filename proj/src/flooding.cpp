#include "loramesh/flooding.hpp"

namespace loramesh {

Packet rebroadcast_copy(const Packet& p, NodeId self) {
  Packet out = p;
  out.current_tx = self;
  out.routed = false;
  out.next_hop.reset();
  out.forward_set.clear();
  out.battery_piggyback.reset();
  out.hop_count = p.hop_count + 1;
  return out;
}

std::optional<Packet> flood_on_deliver(Role role, NodeId self, const Packet& p, Delivery d) {
  if (role != Role::Repeater || d == Delivery::Duplicate || p.interference) return std::nullopt;
  return rebroadcast_copy(p, self);
}

}  // namespace loramesh
