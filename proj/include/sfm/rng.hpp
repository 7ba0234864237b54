#pragma once

#include <array>
#include <cstdint>

namespace sfm {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Top 53 bits mapped onto [0, 1).
inline constexpr double uniform_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Counter-based stream: the i-th draw is a pure function of
/// (key, stream, i), so results never depend on evaluation order.
class CounterRng {
public:
  CounterRng(std::uint64_t key, std::uint64_t stream) : key_(key), stream_(stream) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; consumes two uniforms.
  double normal();

  std::uint64_t position() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  PhiloxCounter block_{};
  int lane_ = 4;
};

}  // namespace sfm
