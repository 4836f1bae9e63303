#pragma once

#include <span>

#include "swarmdc/fields.hpp"

namespace swarmdc {

enum class KdeBoundary {
  reflect,   // mirror-image kernels across each wall, then per-sample renormalization
  truncate,  // kernel cut at the walls, then per-sample renormalization
};

struct KdeConfig {
  double bandwidth = 0.04;
  double density_floor = 1e-3;
  KdeBoundary boundary = KdeBoundary::reflect;

  void validate() const;
};

/// Gaussian kernel density estimate of the sample positions, evaluated at the cell
/// centres. Every sample contributes exactly 1/N of grid mass; the result is then
/// floored at density_floor and renormalized to unit mass.
ScalarField kde_estimate(std::span<const Vec2> positions, const KdeConfig& cfg, const Grid& grid);

}  // namespace swarmdc
