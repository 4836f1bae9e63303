#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "swarmdc/fields.hpp"

namespace swarmdc {

/// Probability density on the grid at time t.
struct FpkState {
  ScalarField p;
  double t = 0.0;
};

/// Outcome of the explicit stability test.
struct CflCheck {
  bool ok = true;
  double advective = 0.0;  // dt * (max|v1|/dx + max|v2|/dy)
  double diffusive = 0.0;  // dt * 2 * (sigma11/dx^2 + sigma22/dy^2)
  double max_dt = 0.0;     // +inf when both rates vanish
};

/// Both numbers must stay <= 0.5 for the explicit upwind scheme.
CflCheck check_cfl(const VectorField& v, const DiffusionMatrix& D, double dt);

/// One explicit finite-volume step of dp/dt = -div(v p - sigma grad p) with zero flux
/// through the walls. Advection is upwinded on face-averaged velocities; diffusion is
/// centred. Throws CflViolation when dt is too large and NumericError when a node
/// drops below -1e-12.
FpkState fpk_step(const FpkState& state, const VectorField& v, const DiffusionMatrix& D, double dt);

/// Velocity as a function of time and the current density (closed-loop fields need p).
using VelocityProvider = std::function<VectorField(double t, const ScalarField& p)>;

struct FpkRunOptions {
  std::optional<ScalarField> target;  // enables l2_error recording
  int record_every = 0;               // 0: keep only the initial and final states
};

struct FpkTrajectory {
  std::vector<FpkState> states;  // recorded snapshots, first and last always present
  std::vector<double> times;     // every step, starting at t0
  std::vector<double> mass;      // integral of p per step
  std::vector<double> min_p;
  std::vector<double> l2_error;  // ||p - target||_L2 per step, empty without a target
};

/// Repeats fpk_step floor(T/dt + 1e-9) times.
FpkTrajectory run_fpk(const ScalarField& p0, const VelocityProvider& velocity,
                      const DiffusionMatrix& D, double dt, double T,
                      const FpkRunOptions& options = {});

}  // namespace swarmdc
