#include "loramesh/mac.hpp"

#include <algorithm>

namespace loramesh {

void DedupCache::expire(double now) {
  while (!order_.empty() &&
         (now - order_.front().first > ttl_s_ || order_.size() > capacity_)) {
    auto [t, id] = order_.front();
    order_.pop_front();
    auto it = by_id_.find(id);
    if (it != by_id_.end() && it->second == t) by_id_.erase(it);
  }
}

bool DedupCache::contains(PacketId id, double now) {
  expire(now);
  return by_id_.count(id) != 0;
}

void DedupCache::insert(PacketId id, double now) {
  by_id_[id] = now;
  order_.emplace_back(now, id);
  expire(now);
}

std::optional<Packet> MacState::enqueue(Packet p, std::size_t capacity) {
  std::optional<Packet> dropped;
  if (queue.size() >= capacity) {
    dropped = std::move(queue.front());
    queue.pop_front();
  }
  queue.push_back(std::move(p));
  return dropped;
}

bool MacState::remove(PacketId id) {
  auto it = std::find_if(queue.begin(), queue.end(), [&](const Packet& p) { return p.id == id; });
  if (it == queue.end()) return false;
  queue.erase(it);
  return true;
}

MacAction schedule_tx(MacState& state, double now, const MacParams& params, RngStream& rng) {
  if (state.mode != MacMode::Idle || state.queue.empty()) return {};
  state.mode = MacMode::WaitingRandom;
  ++state.token;
  return {MacAction::Kind::WaitUntil, now + rng.uniform(params.wait_min_s, params.wait_max_s)};
}

MacAction on_sense(MacState& state, double now, bool channel_busy, const MacParams& params,
                   RngStream& rng) {
  if (state.queue.empty()) {
    state.mode = MacMode::Idle;
    return {};
  }
  if (channel_busy) {
    ++state.token;
    return {MacAction::Kind::WaitUntil,
            now + rng.uniform(params.backoff_min_s, params.backoff_max_s)};
  }
  state.mode = MacMode::Transmitting;
  return {MacAction::Kind::Transmit, now};
}

Delivery on_rx_complete(MacState& state, const Packet& packet, double now) {
  return state.dedup.contains(packet.id, now) ? Delivery::Duplicate : Delivery::Fresh;
}

}  // namespace loramesh
