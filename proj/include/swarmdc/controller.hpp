#pragma once

#include <optional>

#include "swarmdc/fields.hpp"

namespace swarmdc {

/// Gains of the density feedback and of the backstepping stage, plus the target.
struct ControlParams {
  double alpha = 0.003;  // density feedback gain
  double k = 0.008;      // velocity-error gain
  double eps1 = 2.0;     // relaxation of the density cross term
  double eps2 = 2.0;     // relaxation of the noise term
  ScalarField p_star;

  /// Throws InvalidArgument unless the gains are positive and p_star has unit mass
  /// (within 1e-6) and a positive minimum.
  void validate() const;
};

/// Everything an agent needs from the grid at one control instant.
struct ControlFields {
  VectorField v_d;
  VectorField dv_d_dt;      // backward difference, zero on the first step
  TensorField jac_v_d;      // row r = gradient of v_d component r
  VectorField G;            // Ito correction
  ScalarField grad_phi_term;  // |p grad(p - p_star)|^4
  double t = 0.0;
};

/// Control fields read at an agent position.
struct ControlSample {
  Vec2 v_d = Vec2::Zero();
  Vec2 dv_d_dt = Vec2::Zero();
  Mat2 jac_v_d = Mat2::Zero();
  Vec2 G = Vec2::Zero();
  double grad_phi_term = 0.0;
};

/// Per-agent noise channel and velocity error.
struct AgentChannel {
  Mat2 g2 = Mat2::Zero();
  Vec2 v_tilde = Vec2::Zero();
};

/// The input split as u = feedforward - damping * v_tilde.
struct InputTerms {
  Vec2 feedforward = Vec2::Zero();  // dv_d/dt + (d_x v_d) v + G
  double damping = 0.0;             // k + |p grad p~|^4/(4 eps1^4) + 3 Tr(A^T A)^2/(4 eps2^2)
  Vec2 v_tilde = Vec2::Zero();

  Vec2 input() const { return feedforward - damping * v_tilde; }
  /// Input that, held over dt, decays v_tilde by exactly exp(-damping*dt) instead of
  /// the explicit factor (1 - damping*dt).
  Vec2 held_input(double dt) const;
};

/// v_d = -(alpha grad(p - p_star) - sigma grad p) / p, nodewise.
VectorField density_feedback(const ScalarField& p, const ControlParams& params, const DiffusionMatrix& D);

/// Derivative fields for the backstepping law. v_d_prev, when given, must have been
/// computed dt earlier.
ControlFields build_control_fields(const VectorField& v_d_now, const std::optional<VectorField>& v_d_prev,
                                   double dt, const DiffusionMatrix& D, const ScalarField& p,
                                   const ControlParams& params);

ControlSample sample_control(const ControlFields& cf, const Vec2& x);

InputTerms backstepping_terms(const ControlSample& s, const Vec2& v, const AgentChannel& ch,
                              const ControlParams& params, const DiffusionMatrix& D);

/// Backstepping input for an agent at x with velocity v.
Vec2 backstepping_input(const Vec2& x, const Vec2& v, const ControlFields& cf, const AgentChannel& ch,
                        const ControlParams& params, const DiffusionMatrix& D);

/// Fills ch.v_tilde = v - v_d(x).
AgentChannel make_channel(const Mat2& g2, const Vec2& x, const Vec2& v, const ControlFields& cf);

}  // namespace swarmdc
