#pragma once

// Byte layouts of the position-learning control payloads. All multi-byte
// fields are big-endian.
//
// NeighborReport body (4 B header + 4 B per entry):
//   u16 reporter uid | u8 chunk index | u8 entry count
//   entry: u16 neighbor uid | u16 distance (0.1 m units)
//
// RouteTableChunk body (4 B header + 6 B per row + 4 B per pair):
//   u8 chunk index | u8 chunk count | u8 row count | u8 pair count
//   row:  u16 uid | u16 distance value (0.1 m units) | u16 upstream uid
//   pair: u16 parent uid | u16 child uid   (child is in parent's downlink set)
//
// 0xFFFF in a uid field means "none"; in a distance field, "unreachable".

#include <cstdint>
#include <span>
#include <vector>

#include "loramesh/core.hpp"

namespace loramesh::wire {

inline constexpr std::uint16_t kNone = 0xFFFF;
inline constexpr double kDistanceUnitM = 0.1;
inline constexpr double kMaxDistanceM = (kNone - 1) * kDistanceUnitM;

std::uint16_t encode_distance(double meters);
/// Returns +inf for kNone.
double decode_distance(std::uint16_t raw);
std::uint16_t encode_uid(NodeId uid);
NodeId decode_uid(std::uint16_t raw);

struct NeighborEntry {
  NodeId neighbor = kNoNode;
  double distance_m = 0.0;
};

struct NeighborReport {
  NodeId reporter = kNoNode;
  int chunk_index = 0;
  std::vector<NeighborEntry> entries;
};

struct RouteRow {
  NodeId uid = kNoNode;
  double distance_value = 0.0;
  NodeId upstream = kNoNode;
};

struct DownlinkPair {
  NodeId parent = kNoNode;
  NodeId child = kNoNode;
};

struct RouteTableChunk {
  int chunk_index = 0;
  int chunk_count = 1;
  std::vector<RouteRow> rows;
  std::vector<DownlinkPair> pairs;
};

std::vector<std::uint8_t> encode(const NeighborReport& report);
NeighborReport decode_neighbor_report(std::span<const std::uint8_t> body);

std::vector<std::uint8_t> encode(const RouteTableChunk& chunk);
RouteTableChunk decode_route_chunk(std::span<const std::uint8_t> body);

/// Splits a neighbor list into report bodies no larger than max_payload.
/// An empty neighborhood still yields one (empty) report.
std::vector<NeighborReport> chunk_report(NodeId reporter, const std::vector<NeighborEntry>& entries,
                                         int max_payload);

/// Packs rows then pairs into chunks no larger than max_payload.
std::vector<RouteTableChunk> chunk_table(const std::vector<RouteRow>& rows,
                                         const std::vector<DownlinkPair>& pairs, int max_payload);

}  // namespace loramesh::wire
