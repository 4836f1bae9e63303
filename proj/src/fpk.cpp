#include "swarmdc/fpk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "swarmdc/error.hpp"
#include "swarmdc/field_ops.hpp"

namespace swarmdc {

CflCheck check_cfl(const VectorField& v, const DiffusionMatrix& D, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const Grid& g = v.grid();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    m1 = std::max(m1, std::abs(v.c1[k]));
    m2 = std::max(m2, std::abs(v.c2[k]));
  }
  const double adv_rate = m1 / g.dx() + m2 / g.dy();
  const double dif_rate = 2.0 * (D.sigma()(0, 0) / (g.dx() * g.dx()) + D.sigma()(1, 1) / (g.dy() * g.dy()));
  CflCheck c;
  c.advective = dt * adv_rate;
  c.diffusive = dt * dif_rate;
  c.ok = c.advective <= 0.5 && c.diffusive <= 0.5;
  const double inf = std::numeric_limits<double>::infinity();
  c.max_dt = std::min(adv_rate > 0.0 ? 0.5 / adv_rate : inf, dif_rate > 0.0 ? 0.5 / dif_rate : inf);
  return c;
}

FpkState fpk_step(const FpkState& state, const VectorField& v, const DiffusionMatrix& D, double dt) {
  const ScalarField& p = state.p;
  const Grid& g = p.grid();
  if (!(v.grid() == g)) throw InvalidArgument("velocity and density grids differ");
  const CflCheck cfl = check_cfl(v, D, dt);
  if (!cfl.ok) {
    std::ostringstream os;
    os << "FPK step violates the stability bound (advective " << cfl.advective << ", diffusive "
       << cfl.diffusive << ", limit 0.5); largest admissible dt = " << cfl.max_dt;
    throw CflViolation(os.str(), cfl.max_dt);
  }

  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  const Mat2& s = D.sigma();
  const bool cross = s(0, 1) != 0.0;
  // Tangential derivatives for the off-diagonal diffusion terms.
  const ScalarField p1 = cross ? d1(p) : ScalarField();
  const ScalarField p2 = cross ? d2(p) : ScalarField();

  // Face fluxes: fx(i, j) on the face between (i, j) and (i+1, j), i < nx-1;
  // wall faces carry zero flux and are never stored.
  std::vector<double> fx(static_cast<std::size_t>(nx - 1) * ny);
  std::vector<double> fy(static_cast<std::size_t>(nx) * (ny - 1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx - 1; ++i) {
      const std::size_t a = g.index(i, j), b = g.index(i + 1, j);
      const double vf = 0.5 * (v.c1[a] + v.c1[b]);
      double flux = vf * (vf >= 0.0 ? p[a] : p[b]);
      flux -= s(0, 0) * (p[b] - p[a]) / dx;
      if (cross) flux -= s(0, 1) * 0.5 * (p2[a] + p2[b]);
      fx[static_cast<std::size_t>(j) * (nx - 1) + i] = flux;
    }
  }
  for (int j = 0; j < ny - 1; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t a = g.index(i, j), b = g.index(i, j + 1);
      const double vf = 0.5 * (v.c2[a] + v.c2[b]);
      double flux = vf * (vf >= 0.0 ? p[a] : p[b]);
      flux -= s(1, 1) * (p[b] - p[a]) / dy;
      if (cross) flux -= s(1, 0) * 0.5 * (p1[a] + p1[b]);
      fy[static_cast<std::size_t>(j) * nx + i] = flux;
    }
  }

  FpkState next{ScalarField(g), state.t + dt};
  double lowest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double east = i < nx - 1 ? fx[static_cast<std::size_t>(j) * (nx - 1) + i] : 0.0;
      const double west = i > 0 ? fx[static_cast<std::size_t>(j) * (nx - 1) + i - 1] : 0.0;
      const double north = j < ny - 1 ? fy[static_cast<std::size_t>(j) * nx + i] : 0.0;
      const double south = j > 0 ? fy[static_cast<std::size_t>(j - 1) * nx + i] : 0.0;
      const double value = p(i, j) - dt * ((east - west) / dx + (north - south) / dy);
      next.p(i, j) = value;
      lowest = std::min(lowest, value);
    }
  }
  if (!(lowest >= -1e-12)) {
    std::ostringstream os;
    os << "FPK step produced density " << lowest << " at t=" << next.t;
    throw NumericError(os.str());
  }
  return next;
}

FpkTrajectory run_fpk(const ScalarField& p0, const VelocityProvider& velocity,
                      const DiffusionMatrix& D, double dt, double T, const FpkRunOptions& options) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw InvalidArgument("run_fpk needs dt > 0 and T >= 0");
  if (options.target && !(options.target->grid() == p0.grid())) {
    throw InvalidArgument("target density lives on a different grid");
  }
  const long steps = static_cast<long>(std::floor(T / dt + 1e-9));
  FpkTrajectory out;
  FpkState state{p0, 0.0};
  auto record = [&](const FpkState& st) {
    out.times.push_back(st.t);
    out.mass.push_back(st.p.integral());
    out.min_p.push_back(st.p.min());
    if (options.target) out.l2_error.push_back(l2_norm(st.p - *options.target));
  };
  record(state);
  out.states.push_back(state);
  for (long n = 1; n <= steps; ++n) {
    const VectorField v = velocity(state.t, state.p);
    state = fpk_step(state, v, D, dt);
    state.t = n * dt;
    record(state);
    const bool keep = (options.record_every > 0 && n % options.record_every == 0) || n == steps;
    if (keep) out.states.push_back(state);
  }
  return out;
}

}  // namespace swarmdc
