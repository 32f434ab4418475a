#include "loramesh/rng.hpp"

#include <cmath>
#include <numbers>

namespace loramesh {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose)
    : key_(mix64(mix64(seed) ^ mix64((node << 8) ^ static_cast<std::uint64_t>(purpose) ^
                                     0x5A17C0DE00000000ull))) {}

std::uint64_t RngStream::peek_u64(std::uint64_t index) const {
  return mix64(key_ ^ mix64(index));
}

std::uint64_t RngStream::next_u64() { return peek_u64(counter_++); }

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

double RngStream::exponential(double mean) { return -mean * std::log1p(-next_unit()); }

double RngStream::normal(double mean, double sigma) {
  const double u1 = 1.0 - next_unit();  // (0, 1]
  const double u2 = next_unit();
  return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace loramesh
