#pragma once

#include <deque>
#include <optional>
#include <unordered_map>

#include "loramesh/core.hpp"
#include "loramesh/rng.hpp"
#include "loramesh/scenario.hpp"

namespace loramesh {

/// Recently forwarded packet ids, bounded by age and count.
class DedupCache {
 public:
  DedupCache() = default;
  DedupCache(double ttl_s, std::size_t capacity) : ttl_s_(ttl_s), capacity_(capacity) {}

  bool contains(PacketId id, double now);
  void insert(PacketId id, double now);
  std::size_t size() const { return by_id_.size(); }

 private:
  void expire(double now);

  double ttl_s_ = 60.0;
  std::size_t capacity_ = 4096;
  std::deque<std::pair<double, PacketId>> order_;
  std::unordered_map<PacketId, double> by_id_;
};

enum class MacMode { Idle, WaitingRandom, Transmitting };

struct MacState {
  MacMode mode = MacMode::Idle;
  std::deque<Packet> queue;
  DedupCache dedup;
  Channel channel = Channel::Repeater;
  std::uint64_t token = 0;  // invalidates stale sense timers

  /// Appends to the queue. When full, evicts and returns the oldest entry.
  std::optional<Packet> enqueue(Packet p, std::size_t capacity);
  bool remove(PacketId id);
};

/// What the MAC does next after a packet is queued or a sense attempt.
struct MacAction {
  enum class Kind { None, WaitUntil, Transmit } kind = Kind::None;
  double at = 0.0;
};

/// Queue non-empty and idle: wait a uniform random interval, then sense.
MacAction schedule_tx(MacState& state, double now, const MacParams& params, RngStream& rng);

/// Carrier sense at the end of a wait. Busy -> fresh backoff draw; idle ->
/// transmit the head of the queue now.
MacAction on_sense(MacState& state, double now, bool channel_busy, const MacParams& params,
                   RngStream& rng);

enum class Delivery { Fresh, Duplicate };

/// Received frames already in the dedup cache are duplicates.
Delivery on_rx_complete(MacState& state, const Packet& packet, double now);

}  // namespace loramesh
