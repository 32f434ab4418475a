#pragma once

#include <cstdint>
#include <string_view>

namespace loramesh {

/// Purpose tags for named random streams. Appending new tags never perturbs
/// existing streams.
enum class StreamPurpose : std::uint32_t {
  Traffic = 1,
  MacWait = 2,
  Standby = 3,
  Learning = 4,
  Shadowing = 5,
};

std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator: draw i of stream (seed, node, purpose) is a pure
/// function of those four values, so adding a node never shifts another
/// node's draws and results do not depend on the platform's <random>.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double next_unit();
  double uniform(double lo, double hi);
  double exponential(double mean);
  /// Standard normal (Box-Muller).
  double normal(double mean, double sigma);

  std::uint64_t draws() const { return counter_; }
  /// Value of draw `index` without advancing.
  std::uint64_t peek_u64(std::uint64_t index) const;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace loramesh
