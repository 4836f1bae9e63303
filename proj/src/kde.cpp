#include "swarmdc/kde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "swarmdc/error.hpp"

namespace swarmdc {

void KdeConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InvalidArgument("KDE bandwidth must be positive");
  if (!(density_floor > 0.0 && density_floor < 1.0)) {
    throw InvalidArgument("KDE density floor must lie in (0, 1)");
  }
}

namespace {

// Normalized 1-D kernel weights of one sample coordinate at the n cell centres,
// scaled so that sum(w) * h == 1.
void kernel_1d(double y, int n, double h, double bw, KdeBoundary boundary, std::vector<double>& w) {
  const double inv = 1.0 / (2.0 * bw * bw);
  double total = 0.0;
  for (int m = 0; m < n; ++m) {
    const double x = (m + 0.5) * h;
    double k = std::exp(-(x - y) * (x - y) * inv);
    if (boundary == KdeBoundary::reflect) {
      k += std::exp(-(x + y) * (x + y) * inv);
      k += std::exp(-(x - 2.0 + y) * (x - 2.0 + y) * inv);
    }
    w[m] = k;
    total += k;
  }
  const double scale = 1.0 / (total * h);
  for (int m = 0; m < n; ++m) w[m] *= scale;
}

}  // namespace

ScalarField kde_estimate(std::span<const Vec2> positions, const KdeConfig& cfg, const Grid& grid) {
  cfg.validate();
  if (positions.empty()) throw InvalidArgument("KDE needs at least one sample");
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<double> wx(nx), wy(ny);
  ScalarField p(grid);
  std::vector<double>& acc = p.values();
  for (const Vec2& x : positions) {
    if (!(x.x() >= 0.0 && x.x() <= 1.0 && x.y() >= 0.0 && x.y() <= 1.0)) {
      throw InvalidArgument("KDE sample outside the unit square");
    }
    kernel_1d(x.x(), nx, grid.dx(), cfg.bandwidth, cfg.boundary, wx);
    kernel_1d(x.y(), ny, grid.dy(), cfg.bandwidth, cfg.boundary, wy);
    for (int j = 0; j < ny; ++j) {
      const double b = wy[j];
      double* row = acc.data() + grid.index(0, j);
      for (int i = 0; i < nx; ++i) row[i] += b * wx[i];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(positions.size());
  for (double& v : acc) v *= inv_n;

  // Rounding residue of the per-sample normalization, then the floor.
  p *= 1.0 / p.integral();
  for (double& v : acc) v = std::max(v, cfg.density_floor);
  p *= 1.0 / p.integral();
  return p;
}

}  // namespace swarmdc
