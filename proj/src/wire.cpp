#include "loramesh/wire.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace loramesh::wire {

namespace {

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

std::uint16_t get16(std::span<const std::uint8_t> in, std::size_t at) {
  if (at + 2 > in.size()) throw std::invalid_argument("truncated control payload");
  return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
}

std::uint8_t get8(std::span<const std::uint8_t> in, std::size_t at) {
  if (at >= in.size()) throw std::invalid_argument("truncated control payload");
  return in[at];
}

}  // namespace

std::uint16_t encode_distance(double meters) {
  if (!std::isfinite(meters)) return kNone;
  if (meters < 0.0) throw std::invalid_argument("negative distance");
  const double units = std::round(meters / kDistanceUnitM);
  if (units >= kNone) return kNone - 1;  // saturate
  return static_cast<std::uint16_t>(units);
}

double decode_distance(std::uint16_t raw) {
  if (raw == kNone) return std::numeric_limits<double>::infinity();
  return raw * kDistanceUnitM;
}

std::uint16_t encode_uid(NodeId uid) {
  if (uid == kNoNode) return kNone;
  if (uid >= kNone) throw std::invalid_argument("uid " + std::to_string(uid) + " exceeds 16 bits");
  return static_cast<std::uint16_t>(uid);
}

NodeId decode_uid(std::uint16_t raw) { return raw == kNone ? kNoNode : NodeId{raw}; }

std::vector<std::uint8_t> encode(const NeighborReport& report) {
  if (report.entries.size() > 255) throw std::invalid_argument("too many report entries");
  std::vector<std::uint8_t> out;
  out.reserve(payload::kReportHeader + payload::kReportEntry * report.entries.size());
  put16(out, encode_uid(report.reporter));
  out.push_back(static_cast<std::uint8_t>(report.chunk_index));
  out.push_back(static_cast<std::uint8_t>(report.entries.size()));
  for (const auto& e : report.entries) {
    put16(out, encode_uid(e.neighbor));
    put16(out, encode_distance(e.distance_m));
  }
  return out;
}

NeighborReport decode_neighbor_report(std::span<const std::uint8_t> body) {
  NeighborReport r;
  r.reporter = decode_uid(get16(body, 0));
  r.chunk_index = get8(body, 2);
  const int n = get8(body, 3);
  std::size_t at = payload::kReportHeader;
  for (int i = 0; i < n; ++i, at += payload::kReportEntry)
    r.entries.push_back({decode_uid(get16(body, at)), decode_distance(get16(body, at + 2))});
  return r;
}

std::vector<std::uint8_t> encode(const RouteTableChunk& chunk) {
  if (chunk.rows.size() > 255 || chunk.pairs.size() > 255)
    throw std::invalid_argument("too many entries in one chunk");
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(chunk.chunk_index));
  out.push_back(static_cast<std::uint8_t>(chunk.chunk_count));
  out.push_back(static_cast<std::uint8_t>(chunk.rows.size()));
  out.push_back(static_cast<std::uint8_t>(chunk.pairs.size()));
  for (const auto& row : chunk.rows) {
    put16(out, encode_uid(row.uid));
    put16(out, encode_distance(row.distance_value));
    put16(out, encode_uid(row.upstream));
  }
  for (const auto& p : chunk.pairs) {
    put16(out, encode_uid(p.parent));
    put16(out, encode_uid(p.child));
  }
  return out;
}

RouteTableChunk decode_route_chunk(std::span<const std::uint8_t> body) {
  RouteTableChunk c;
  c.chunk_index = get8(body, 0);
  c.chunk_count = get8(body, 1);
  const int rows = get8(body, 2);
  const int pairs = get8(body, 3);
  std::size_t at = payload::kChunkHeader;
  for (int i = 0; i < rows; ++i, at += payload::kChunkRow)
    c.rows.push_back({decode_uid(get16(body, at)), decode_distance(get16(body, at + 2)),
                      decode_uid(get16(body, at + 4))});
  for (int i = 0; i < pairs; ++i, at += payload::kChunkPair)
    c.pairs.push_back({decode_uid(get16(body, at)), decode_uid(get16(body, at + 2))});
  return c;
}

std::vector<NeighborReport> chunk_report(NodeId reporter, const std::vector<NeighborEntry>& entries,
                                         int max_payload) {
  const int per_chunk = (max_payload - payload::kReportHeader) / payload::kReportEntry;
  if (per_chunk < 1) throw std::invalid_argument("max payload too small for a neighbor report");
  std::vector<NeighborReport> out;
  std::size_t i = 0;
  do {
    NeighborReport r;
    r.reporter = reporter;
    r.chunk_index = static_cast<int>(out.size());
    for (int k = 0; k < per_chunk && i < entries.size(); ++k) r.entries.push_back(entries[i++]);
    out.push_back(std::move(r));
  } while (i < entries.size());
  return out;
}

std::vector<RouteTableChunk> chunk_table(const std::vector<RouteRow>& rows,
                                         const std::vector<DownlinkPair>& pairs, int max_payload) {
  if (max_payload < payload::kChunkHeader + payload::kChunkRow)
    throw std::invalid_argument("max payload too small for a route table chunk");
  std::vector<RouteTableChunk> out;
  if (rows.empty() && pairs.empty()) return out;
  RouteTableChunk cur;
  int used = payload::kChunkHeader;
  auto flush = [&] {
    out.push_back(std::move(cur));
    cur = {};
    used = payload::kChunkHeader;
  };
  for (const auto& row : rows) {
    if (used + payload::kChunkRow > max_payload || cur.rows.size() == 255) flush();
    cur.rows.push_back(row);
    used += payload::kChunkRow;
  }
  for (const auto& p : pairs) {
    if (used + payload::kChunkPair > max_payload || cur.pairs.size() == 255) flush();
    cur.pairs.push_back(p);
    used += payload::kChunkPair;
  }
  flush();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].chunk_index = static_cast<int>(i);
    out[i].chunk_count = static_cast<int>(out.size());
  }
  return out;
}

}  // namespace loramesh::wire
