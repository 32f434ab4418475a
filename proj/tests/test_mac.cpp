#include <doctest.h>

#include "loramesh/flooding.hpp"
#include "loramesh/mac.hpp"

using namespace loramesh;

TEST_CASE("dedup expires by age and by count") {
  DedupCache d(10.0, 3);
  d.insert(1, 0.0);
  CHECK(d.contains(1, 5.0));
  CHECK_FALSE(d.contains(1, 10.5));
  for (PacketId id = 2; id <= 5; ++id) d.insert(id, 11.0);
  CHECK(d.size() == 3);
  CHECK_FALSE(d.contains(2, 11.0));
  CHECK(d.contains(5, 11.0));
}

TEST_CASE("queue drops the oldest when full") {
  MacState s;
  for (PacketId id = 1; id <= 3; ++id) {
    Packet p;
    p.id = id;
    CHECK_FALSE(s.enqueue(p, 3).has_value());
  }
  Packet p;
  p.id = 4;
  const auto dropped = s.enqueue(p, 3);
  REQUIRE(dropped.has_value());
  CHECK(dropped->id == 1);
  CHECK(s.remove(3));
  CHECK_FALSE(s.remove(3));
  CHECK(s.queue.size() == 2);
}

TEST_CASE("random wait then sense") {
  MacParams params;
  RngStream rng(1, 1, StreamPurpose::MacWait);
  MacState s;
  CHECK(schedule_tx(s, 0.0, params, rng).kind == MacAction::Kind::None);
  Packet p;
  p.id = 9;
  s.enqueue(p, 8);
  for (int i = 0; i < 200; ++i) {
    MacState t = s;
    const auto a = schedule_tx(t, 5.0, params, rng);
    REQUIRE(a.kind == MacAction::Kind::WaitUntil);
    CHECK(a.at >= 5.0 + params.wait_min_s);
    CHECK(a.at <= 5.0 + params.wait_max_s);
    CHECK(t.mode == MacMode::WaitingRandom);
  }
  schedule_tx(s, 5.0, params, rng);
  const auto busy = on_sense(s, 5.1, true, params, rng);
  CHECK(busy.kind == MacAction::Kind::WaitUntil);
  CHECK(busy.at >= 5.1 + params.backoff_min_s);
  const auto go = on_sense(s, busy.at, false, params, rng);
  CHECK(go.kind == MacAction::Kind::Transmit);
  CHECK(s.mode == MacMode::Transmitting);
}

TEST_CASE("second copy of a packet is a duplicate") {
  MacState s;
  Packet p;
  p.id = 5;
  CHECK(on_rx_complete(s, p, 1.0) == Delivery::Fresh);
  CHECK(on_rx_complete(s, p, 1.1) == Delivery::Fresh);  // the caller records what it keeps
  s.dedup.insert(p.id, 1.1);
  CHECK(on_rx_complete(s, p, 1.5) == Delivery::Duplicate);
}

TEST_CASE("flooding rebroadcasts only fresh frames at repeaters") {
  Packet p;
  p.id = 3;
  p.hop_count = 1;
  p.routed = true;
  p.next_hop = 2;
  p.battery_piggyback = 40;
  const auto copy = flood_on_deliver(Role::Repeater, 7, p, Delivery::Fresh);
  REQUIRE(copy.has_value());
  CHECK(copy->current_tx == 7);
  CHECK(copy->hop_count == 2);
  CHECK_FALSE(copy->routed);
  CHECK_FALSE(copy->battery_piggyback.has_value());
  CHECK_FALSE(flood_on_deliver(Role::Repeater, 7, p, Delivery::Duplicate));
  CHECK_FALSE(flood_on_deliver(Role::Gateway, 0, p, Delivery::Fresh));
  p.interference = true;
  CHECK_FALSE(flood_on_deliver(Role::Repeater, 7, p, Delivery::Fresh));
}
