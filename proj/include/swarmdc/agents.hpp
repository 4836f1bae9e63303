#pragma once

#include <utility>

#include "swarmdc/fields.hpp"
#include "swarmdc/rng.hpp"

namespace swarmdc {

/// Second-order stochastic agent: dx = v dt + g1 dW, dv = u dt + g2 dW (one dW per agent).
struct AgentState {
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  Mat2 g2 = Mat2::Zero();
};

/// Per-robot constant dynamics.
struct RobotParams {
  double d = 0.05;                 // offset of the controlled point ahead of the axle
  Mat2 M = Mat2::Identity();       // inertia, symmetric positive definite
  Mat2 V_m = Mat2::Zero();         // centripetal/coriolis, held constant
  Vec2 F = Vec2::Zero();           // viscous friction coefficients: F(v) = diag(F) v
  Mat2 f2 = Mat2::Zero();          // velocity noise before M^-1, g2 = M^-1 f2
  Eigen::Matrix<double, 3, 2> f1 = Eigen::Matrix<double, 3, 2>::Zero();  // pose noise; rows 0-1 are g1

  void validate() const;
  Mat2 g2() const { return M.inverse() * f2; }
};

/// Nonholonomic robot with pose (x1, x2, theta) and wheel velocities (linear, angular).
struct RobotState {
  Vec2 x = Vec2::Zero();
  double theta = 0.0;
  Vec2 v = Vec2::Zero();
  RobotParams params;

  /// Velocity of the controlled point: T(theta, d) v.
  Vec2 euclidean_velocity() const;
};

/// T(theta, d) = [[cos, -d sin], [sin, d cos]]; maps wheel velocities to point velocity.
Mat2 robot_T(double theta, double d);
Mat2 robot_T_inverse(double theta, double d);

/// Mirror rule per axis: overshoot past a wall is folded back and that velocity
/// component flips sign.
std::pair<Vec2, Vec2> reflect_boundary(Vec2 x, Vec2 v);

/// One Euler-Maruyama step of the integrator agent with input u.
AgentState em_step_integrator(const AgentState& a, const Vec2& u, const DiffusionMatrix& D, double dt,
                              RngStream& rng);

/// Wheel-velocity command realizing a desired point velocity: T^-1 v_d.
Vec2 robot_velocity_command(const Vec2& v_d_euclidean, double theta, double d);

/// tau = M u + V_m v + diag(F) v.
Vec2 feedback_linearize(const RobotState& r, const Vec2& u);

/// One Euler-Maruyama step of the robot dynamics under torque tau.
RobotState em_step_robot(const RobotState& r, const Vec2& tau, double dt, RngStream& rng);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace swarmdc
