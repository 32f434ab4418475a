#pragma once

#include <optional>

#include "loramesh/core.hpp"
#include "loramesh/mac.hpp"

namespace loramesh {

/// Copy of `p` as `self` will rebroadcast it: unaddressed, one hop further,
/// no piggyback.
Packet rebroadcast_copy(const Packet& p, NodeId self);

/// Flooding decision on a fresh or duplicate reception. Repeaters rebroadcast
/// every first-seen frame; gateways and end devices never do.
std::optional<Packet> flood_on_deliver(Role role, NodeId self, const Packet& p, Delivery d);

}  // namespace loramesh
