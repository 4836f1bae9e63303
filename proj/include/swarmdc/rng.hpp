#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "swarmdc/fields.hpp"

namespace swarmdc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// What a draw is used for; keeps the streams of different purposes disjoint.
enum class Purpose : std::uint32_t {
  wiener = 0,
  initial_position = 1,
  initial_heading = 2,
  heterogeneity = 3,
  test = 0xffff,
};

/// Counter-based stream keyed by (seed, agent id, step). Draws depend only on the
/// key and the counter, never on call order across agents, so a parallel loop over
/// agents produces the same numbers as a serial one.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t agent, std::uint64_t step, Purpose purpose = Purpose::wiener)
      : seed_(seed), agent_(agent), step_(step), purpose_(purpose) {}

  /// Two independent uniforms in the open interval (0, 1).
  std::array<double, 2> uniform2();
  /// Two independent standard normals (Box-Muller on uniform2).
  Vec2 normal2();
  /// Wiener increment over dt: Normal(0, dt I2).
  Vec2 wiener_increment(double dt) { return std::sqrt(dt) * normal2(); }

 private:
  std::array<std::uint32_t, 4> next_block();

  std::uint64_t seed_;
  std::uint64_t agent_;
  std::uint64_t step_;
  Purpose purpose_;
  std::uint32_t block_ = 0;
};

}  // namespace swarmdc
