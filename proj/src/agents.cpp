#include "swarmdc/agents.hpp"

#include <cmath>
#include <numbers>
#include <tuple>

#include <Eigen/LU>

#include "swarmdc/error.hpp"

namespace swarmdc {
namespace {

constexpr int kMaxFolds = 64;

bool inside(const Vec2& x) { return x.x() >= 0.0 && x.x() <= 1.0 && x.y() >= 0.0 && x.y() <= 1.0; }

}  // namespace

void RobotParams::validate() const {
  if (!(d != 0.0) || !std::isfinite(d)) throw InvalidArgument("robot offset d must be nonzero");
  if (!(M.determinant() > 0.0) || M(0, 1) != M(1, 0)) throw InvalidArgument("robot inertia must be symmetric with det > 0");
  if (!M.allFinite() || !V_m.allFinite() || !F.allFinite() || !f1.allFinite() || !f2.allFinite()) {
    throw InvalidArgument("robot parameters must be finite");
  }
}

Mat2 robot_T(double theta, double d) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 T;
  T << c, -d * s, s, d * c;
  return T;
}

Mat2 robot_T_inverse(double theta, double d) {
  if (d == 0.0) throw InvalidArgument("robot offset d = 0 makes T singular");
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 Ti;
  Ti << c, s, -s / d, c / d;
  return Ti;
}

Vec2 RobotState::euclidean_velocity() const { return robot_T(theta, params.d) * v; }

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

std::pair<Vec2, Vec2> reflect_boundary(Vec2 x, Vec2 v) {
  for (int axis = 0; axis < 2; ++axis) {
    for (int fold = 0; fold < kMaxFolds; ++fold) {
      if (x[axis] < 0.0) {
        x[axis] = -x[axis];
        v[axis] = -v[axis];
      } else if (x[axis] > 1.0) {
        x[axis] = 2.0 - x[axis];
        v[axis] = -v[axis];
      } else {
        break;
      }
    }
  }
  if (!inside(x)) throw NumericError("agent position could not be folded back into the domain");
  return {x, v};
}

AgentState em_step_integrator(const AgentState& a, const Vec2& u, const DiffusionMatrix& D, double dt,
                              RngStream& rng) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!u.allFinite()) throw NumericError("non-finite agent input");
  const Vec2 dW = rng.wiener_increment(dt);
  AgentState next = a;
  next.x = a.x + a.v * dt + D.g1() * dW;
  next.v = a.v + u * dt + a.g2 * dW;
  std::tie(next.x, next.v) = reflect_boundary(next.x, next.v);
  return next;
}

Vec2 robot_velocity_command(const Vec2& v_d_euclidean, double theta, double d) {
  return robot_T_inverse(theta, d) * v_d_euclidean;
}

Vec2 feedback_linearize(const RobotState& r, const Vec2& u) {
  return r.params.M * u + r.params.V_m * r.v + r.params.F.cwiseProduct(r.v);
}

RobotState em_step_robot(const RobotState& r, const Vec2& tau, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!tau.allFinite()) throw NumericError("non-finite robot torque");
  const RobotParams& P = r.params;
  const Eigen::FullPivLU<Mat2> lu(P.M);
  if (!lu.isInvertible()) throw NumericError("singular robot inertia");
  const Vec2 u = lu.solve(tau - P.V_m * r.v - P.F.cwiseProduct(r.v));
  const Vec2 dW = rng.wiener_increment(dt);

  Eigen::Matrix<double, 3, 2> S;
  S.topRows<2>() = robot_T(r.theta, P.d);
  S.row(2) << 0.0, 1.0;
  const Eigen::Vector3d dq = S * r.v * dt + P.f1 * dW;

  RobotState next = r;
  next.x = r.x + dq.head<2>();
  next.theta = r.theta + dq(2);
  next.v = r.v + u * dt + lu.solve(P.f2 * dW);

  if (!inside(next.x)) {
    // Fold the position back, reflect the point velocity across the wall and steer
    // along it at unchanged speed.
    const Vec2 ve = robot_T(next.theta, P.d) * next.v;
    auto [x, ve_reflected] = reflect_boundary(next.x, ve);
    next.x = x;
    const double speed = ve_reflected.norm();
    if (speed > 1e-12) {
      next.theta = std::atan2(ve_reflected.y(), ve_reflected.x());
      next.v = {speed, 0.0};
    }
  }
  next.theta = wrap_angle(next.theta);
  return next;
}

}  // namespace swarmdc
