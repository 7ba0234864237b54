#include "sfm/rng.hpp"

#include <cmath>
#include <numbers>

namespace sfm {

namespace {

constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(prod);
  hi = static_cast<std::uint32_t>(prod >> 32);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, ctr[0], lo0, hi0);
    mulhilo(kMul1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t CounterRng::next_u64() {
  if (lane_ >= 4) {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    block_ = philox4x32_10(ctr, key);
    ++counter_;
    lane_ = 0;
  }
  const std::uint64_t v = (static_cast<std::uint64_t>(block_[lane_]) << 32) | block_[lane_ + 1];
  lane_ += 2;
  return v;
}

double CounterRng::uniform() { return uniform_from_bits(next_u64()); }

double CounterRng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sfm
