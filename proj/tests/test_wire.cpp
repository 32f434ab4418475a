#include <doctest.h>

#include <cmath>

#include "loramesh/wire.hpp"

using namespace loramesh;
using namespace loramesh::wire;

TEST_CASE("distance and uid fields") {
  CHECK(encode_distance(12.34) == 123);
  CHECK(decode_distance(123) == doctest::Approx(12.3));
  CHECK(std::isinf(decode_distance(kNone)));
  CHECK(encode_uid(kNoNode) == kNone);
  CHECK(decode_uid(kNone) == kNoNode);
  CHECK(decode_uid(encode_uid(17)) == 17);
}

TEST_CASE("neighbor report round-trip") {
  NeighborReport r{3, 1, {{1, 84.0}, {4, 50.5}, {5, 94.2}}};
  const auto body = encode(r);
  CHECK(body.size() == static_cast<std::size_t>(payload::kReportHeader + 3 * payload::kReportEntry));
  const auto back = decode_neighbor_report(body);
  CHECK(back.reporter == 3);
  CHECK(back.chunk_index == 1);
  REQUIRE(back.entries.size() == 3);
  CHECK(back.entries[1].neighbor == 4);
  CHECK(back.entries[1].distance_m == doctest::Approx(50.5));
}

TEST_CASE("route chunk round-trip with rows then pairs") {
  RouteTableChunk c;
  c.chunk_index = 0;
  c.chunk_count = 2;
  c.rows = {{3, 124.0, 1}, {18, 0.0, kNoNode}};
  c.pairs = {{3, 5}, {3, 11}};
  const auto body = encode(c);
  CHECK(body.size() == 4u + 2 * 6 + 2 * 4);
  const auto back = decode_route_chunk(body);
  CHECK(back.chunk_count == 2);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].distance_value == doctest::Approx(124.0));
  CHECK(back.rows[1].upstream == kNoNode);
  REQUIRE(back.pairs.size() == 2);
  CHECK(back.pairs[1].child == 11);
}

TEST_CASE("truncated bodies are rejected") {
  auto body = encode(NeighborReport{3, 0, {{1, 84.0}}});
  body.pop_back();
  CHECK_THROWS(decode_neighbor_report(body));
}

TEST_CASE("reports split at the payload limit") {
  std::vector<NeighborEntry> e;
  for (NodeId i = 0; i < 62; ++i) e.push_back({i, 10.0});
  CHECK(chunk_report(1, e, 255).size() == 1);  // 4 + 62*4 = 252
  e.push_back({62, 10.0});
  const auto two = chunk_report(1, e, 255);
  REQUIRE(two.size() == 2);
  CHECK(two[0].entries.size() + two[1].entries.size() == 63);
  CHECK(two[1].chunk_index == 1);
  CHECK(chunk_report(1, {}, 255).size() == 1);
}

TEST_CASE("table chunks respect the payload limit and preserve content") {
  std::vector<RouteRow> rows;
  std::vector<DownlinkPair> pairs;
  for (NodeId i = 0; i < 60; ++i) rows.push_back({i, i * 10.0, i ? i - 1 : kNoNode});
  for (NodeId i = 1; i < 40; ++i) pairs.push_back({i - 1, i});
  const auto chunks = chunk_table(rows, pairs, 64);
  std::size_t nr = 0, np = 0;
  for (const auto& c : chunks) {
    CHECK(encode(c).size() <= 64u);
    CHECK(c.chunk_count == static_cast<int>(chunks.size()));
    nr += c.rows.size();
    np += c.pairs.size();
  }
  CHECK(nr == rows.size());
  CHECK(np == pairs.size());
}
