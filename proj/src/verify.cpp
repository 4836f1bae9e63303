#include "swarmdc/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "swarmdc/agents.hpp"
#include "swarmdc/controller.hpp"
#include "swarmdc/field_ops.hpp"
#include "swarmdc/fpk.hpp"
#include "swarmdc/kde.hpp"
#include "swarmdc/rng.hpp"
#include "swarmdc/scenario.hpp"

namespace swarmdc {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double max_interior_diff(const ScalarField& f, const std::function<double(double, double)>& exact) {
  const Grid& g = f.grid();
  double e = 0.0;
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) e = std::max(e, std::abs(f(i, j) - exact(g.x1(i), g.x2(j))));
  return e;
}

CheckResult affine_exactness() {
  const Grid g(30, 30);
  const auto f = ScalarField::sample(g, [](double x, double y) { return 2.0 * x + 3.0 * y - 1.0; });
  const VectorField gr = gradient(f);
  const VectorField V(ScalarField::sample(g, [](double x, double) { return 0.7 * x; }),
                      ScalarField::sample(g, [](double, double y) { return -1.3 * y; }));
  double e = std::max(max_interior_diff(gr.c1, [](double, double) { return 2.0; }),
                      max_interior_diff(gr.c2, [](double, double) { return 3.0; }));
  e = std::max(e, max_interior_diff(laplacian(f), [](double, double) { return 0.0; }));
  e = std::max(e, max_interior_diff(divergence(V), [](double, double) { return 0.7 - 1.3; }));
  return {"stencils exact on affine fields", e < 1e-10, "max error " + fmt(e)};
}

CheckResult second_order() {
  auto err = [](int n) {
    const Grid g(n, n);
    const auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(kPi * x) * std::cos(kPi * y); });
    const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(kPi * x); });
    const double eg = max_interior_diff(d1(f), [](double x, double y) { return kPi * std::cos(kPi * x) * std::cos(kPi * y); });
    const double el = max_interior_diff(laplacian(c), [](double x, double) { return -kPi * kPi * std::cos(kPi * x); });
    return std::pair{eg, el};
  };
  const auto [g1, l1] = err(32);
  const auto [g2, l2] = err(64);
  const double rg = g1 / g2, rl = l1 / l2;
  return {"second-order convergence", rg >= 3.5 && rl >= 3.5, "ratios " + fmt(rg) + ", " + fmt(rl)};
}

CheckResult fpk_conservation() {
  const Grid g(32, 32);
  auto p = ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.5 * std::cos(kPi * x) * std::cos(2 * kPi * y); });
  p *= 1.0 / p.integral();
  const VectorField v(ScalarField::sample(g, [](double x, double y) { return 0.2 * std::sin(kPi * x) * std::cos(kPi * y); }),
                      ScalarField::sample(g, [](double x, double y) { return -0.2 * std::cos(kPi * x) * std::sin(kPi * y); }));
  const auto D = DiffusionMatrix::isotropic(1e-3);
  FpkState s{p, 0.0};
  double drift = 0.0, lowest = p.min();
  for (int n = 0; n < 2000; ++n) {
    s = fpk_step(s, v, D, 0.02);
    drift = std::max(drift, std::abs(s.p.integral() - 1.0));
    lowest = std::min(lowest, s.p.min());
  }
  return {"FPK mass and positivity", drift <= 1e-10 && lowest >= -1e-12,
          "mass drift " + fmt(drift) + ", min p " + fmt(lowest)};
}

CheckResult kde_mass() {
  const Grid g(30, 30);
  std::vector<Vec2> x;
  for (int a = 0; a < 500; ++a) {
    RngStream r(7, a, 0, Purpose::test);
    const auto u = r.uniform2();
    x.emplace_back(u[0] * u[0], u[1]);
  }
  KdeConfig cfg;
  const ScalarField p = kde_estimate(x, cfg, g);
  const double err = std::abs(p.integral() - 1.0);
  return {"KDE unit mass and floor", err <= 1e-6 && p.min() > 0.0, "mass error " + fmt(err) + ", min " + fmt(p.min())};
}

CheckResult feedback_identities() {
  const Grid g(30, 30);
  ControlParams params;
  params.p_star = ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.3 * std::cos(kPi * x) * std::cos(kPi * y); });
  params.p_star *= 1.0 / params.p_star.integral();
  const VectorField v0 = density_feedback(params.p_star, params, DiffusionMatrix());
  const double zero = std::max(v0.c1.max(), -v0.c1.min());

  const auto p = ScalarField::sample(g, [](double x, double) { return 0.5 + x; });
  ControlParams scaled = params;
  scaled.p_star *= 3.0;
  const auto D = DiffusionMatrix::isotropic(1e-3);
  const VectorField a = density_feedback(p, params, D);
  const VectorField b = density_feedback(3.0 * p, scaled, D);
  double diff = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) diff = std::max(diff, (a.at(k) - b.at(k)).norm());
  return {"density feedback identities", zero == 0.0 && diff < 1e-12,
          "|v_d| at p = p* " + fmt(zero) + ", scaling defect " + fmt(diff)};
}

CheckResult philox_known_answers() {
  const auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  const auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  const bool ok = a == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
                  b == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
  return {"Philox4x32-10 known answers", ok, ok ? "match" : "mismatch"};
}

CheckResult robot_matches_integrator() {
  RobotState r;
  r.x = {0.5, 0.5};
  r.theta = 0.3;
  r.params.M << 2.0, 0.3, 0.3, 0.5;
  r.params.V_m << 0.0, 0.4, -0.4, 0.0;
  r.params.F = {0.2, 0.1};
  AgentState a;
  a.x = r.x;
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    RngStream ur(3, 0, n, Purpose::test);
    const Vec2 u = 0.01 * ur.normal2();
    RngStream n1(3, 1, n), n2(3, 1, n);
    r = em_step_robot(r, feedback_linearize(r, u), 0.02, n1);
    a = em_step_integrator(a, u, DiffusionMatrix(), 0.02, n2);
    worst = std::max(worst, (r.v - a.v).cwiseAbs().maxCoeff());
  }
  return {"feedback-linearized robot matches integrator", worst <= 1e-12, "max velocity gap " + fmt(worst)};
}

CheckResult determinism() {
  ScenarioConfig cfg;
  cfg.agents = 100;
  cfg.t_end = 0.5;
  cfg.sigma = 1e-4 * Mat2::Identity();
  cfg.heterogeneity.g2_base = 0.01 * Mat2::Identity();
  cfg.heterogeneity.spread = 0.2;
  cfg.target.components = {{0.5, {0.3, 0.3}, 0.03 * Mat2::Identity()}, {0.5, {0.7, 0.7}, 0.03 * Mat2::Identity()}};
  cfg.target.floor = 0.2;
  const auto a = metrics_csv(run_scenario(cfg).metrics);
  const auto b = metrics_csv(run_scenario(cfg).metrics);
  return {"same seed, same metrics", a == b, a == b ? "identical" : "differs"};
}

}  // namespace

std::vector<CheckResult> run_verification(const std::function<void(const CheckResult&)>& on_result) {
  const std::vector<std::function<CheckResult()>> checks = {
      affine_exactness, second_order,   fpk_conservation,        kde_mass,
      feedback_identities, philox_known_answers, robot_matches_integrator, determinism};
  std::vector<CheckResult> out;
  for (const auto& check : checks) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {"(check threw)", false, e.what()};
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace swarmdc
