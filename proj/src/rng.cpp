#include "swarmdc/rng.hpp"

#include <cmath>
#include <numbers>

namespace swarmdc {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::array<std::uint32_t, 4> RngStream::next_block() {
  // Counter: agent (32 bits), step (48 bits split), purpose (16 bits), block index.
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(agent_),
      static_cast<std::uint32_t>(step_),
      static_cast<std::uint32_t>(step_ >> 32) ^ (static_cast<std::uint32_t>(agent_ >> 32) << 16),
      (static_cast<std::uint32_t>(purpose_) << 16) | (block_ & 0xffffu),
  };
  ++block_;
  return philox4x32(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

std::array<double, 2> RngStream::uniform2() {
  const auto b = next_block();
  return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
}

Vec2 RngStream::normal2() {
  const auto u = uniform2();
  const double r = std::sqrt(-2.0 * std::log(u[0]));
  const double phase = 2.0 * std::numbers::pi * u[1];
  return {r * std::cos(phase), r * std::sin(phase)};
}

}  // namespace swarmdc
