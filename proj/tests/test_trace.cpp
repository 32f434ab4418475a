#include <doctest.h>

#include <sstream>

#include "loramesh/trace.hpp"

using namespace loramesh;

namespace {
std::vector<TraceEvent> sample() {
  return {
      {0.0, 0, 0, TraceKind::PhaseChange, kNoNode, 4.0, 0.0, PacketKind::DataUp},
      {1.0, 101, 7, TraceKind::Generated, 1, 0.0, 0.0, PacketKind::DataUp},
      {1.0, 101, 7, TraceKind::TxStart, kNoNode, 0.014144, 0.0, PacketKind::DataUp},
      {1.014144, 1, 7, TraceKind::RxOk, 101, 0.014144, -65.123456789, PacketKind::DataUp},
      {2.5, 0, 7, TraceKind::DeliveredToGateway, 1, 1.5, 2.0, PacketKind::DataUp},
      {3.0, 1, 0, TraceKind::EnergyFinal, kNoNode, 0.123, 0.0283, PacketKind::DataUp},
  };
}
}  // namespace

TEST_CASE("kind names round-trip") {
  for (int k = 0; k <= static_cast<int>(TraceKind::EnergyMark); ++k) {
    const auto kind = static_cast<TraceKind>(k);
    CHECK(trace_kind_from_string(to_string(kind)) == kind);
  }
}

TEST_CASE("ndjson round-trip is lossless") {
  const auto t = sample();
  std::stringstream ss;
  write_ndjson(ss, t);
  const auto back = read_ndjson(ss);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back[i].time == t[i].time);
    CHECK(back[i].node == t[i].node);
    CHECK(back[i].packet == t[i].packet);
    CHECK(back[i].kind == t[i].kind);
    CHECK(back[i].peer == t[i].peer);
    CHECK(back[i].value == t[i].value);
    CHECK(back[i].extra == t[i].extra);
    CHECK(back[i].packet_kind == t[i].packet_kind);
  }
  CHECK(trace_digest(back) == trace_digest(t));
}

TEST_CASE("digest reacts to any change") {
  auto t = sample();
  const auto d0 = trace_digest(t);
  t[3].extra += 1e-9;
  CHECK(trace_digest(t) != d0);
  CHECK(hex_digest(d0).size() == 16);
}
