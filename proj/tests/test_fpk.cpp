#include <doctest.h>

#include <cmath>
#include <numbers>

#include "swarmdc/controller.hpp"
#include "swarmdc/error.hpp"
#include "swarmdc/field_ops.hpp"
#include "swarmdc/fpk.hpp"
#include "swarmdc/kde.hpp"

using namespace swarmdc;
using std::numbers::pi;

namespace {

ScalarField normalized(ScalarField f) {
  f *= 1.0 / f.integral();
  return f;
}

VectorField swirl(const Grid& g, double a) {
  return VectorField(
      ScalarField::sample(g, [a](double x, double y) { return a * std::sin(pi * x) * std::cos(pi * y); }),
      ScalarField::sample(g, [a](double x, double y) { return -a * std::cos(pi * x) * std::sin(pi * y); }));
}

}  // namespace

TEST_CASE("uniform density at rest stays put exactly") {
  const Grid g(30, 30);
  const auto next = fpk_step({ScalarField(g, 1.0), 0.0}, VectorField(g), DiffusionMatrix::isotropic(1e-3), 0.02);
  for (double v : next.p.values()) CHECK(v == 1.0);
  CHECK(next.t == doctest::Approx(0.02));
}

TEST_CASE("one step conserves mass for an arbitrary admissible field") {
  const Grid g(40, 32);
  const auto p = normalized(ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.8 * std::sin(5 * x + 3 * y); }));
  const VectorField v(ScalarField::sample(g, [](double x, double y) { return 0.3 * std::cos(7 * x * y); }),
                      ScalarField::sample(g, [](double x, double) { return -0.2 + x * x; }));
  Mat2 s;
  s << 2e-4, 5e-5, 5e-5, 1e-4;
  const auto next = fpk_step({p, 0.0}, v, DiffusionMatrix::from_sigma(s), 0.01);
  CHECK(std::abs(next.p.integral() - p.integral()) <= 1e-12);
  CHECK(next.p.min() >= -1e-12);
}

TEST_CASE("CFL bound") {
  const Grid g(30, 30);
  const auto ok = check_cfl(VectorField(g), DiffusionMatrix::isotropic(1e-3), 0.02);
  CHECK(ok.ok);
  CHECK(ok.advective == 0.0);
  CHECK(ok.diffusive == doctest::Approx(0.072).epsilon(1e-12));

  const auto free = check_cfl(VectorField(g), DiffusionMatrix(), 1e6);
  CHECK(free.ok);
  CHECK(std::isinf(free.max_dt));

  const VectorField fast(ScalarField(g, 30.0), ScalarField(g, 0.0));
  const auto bad = check_cfl(fast, DiffusionMatrix(), 0.02);
  CHECK_FALSE(bad.ok);
  CHECK(bad.advective == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(bad.max_dt == doctest::Approx(0.5 / 900.0).epsilon(1e-12));

  try {
    fpk_step({ScalarField(g, 1.0), 0.0}, fast, DiffusionMatrix(), 0.02);
    FAIL("expected a CFL violation");
  } catch (const CflViolation& e) {
    CHECK(e.max_dt() == doctest::Approx(0.5 / 900.0).epsilon(1e-12));
  }
}

TEST_CASE("rejects mismatched grids and bad steps") {
  const Grid g(16, 16);
  CHECK_THROWS_AS(fpk_step({ScalarField(g, 1.0), 0.0}, VectorField(Grid(16, 17)), DiffusionMatrix(), 0.01),
                  InvalidArgument);
  CHECK_THROWS_AS(fpk_step({ScalarField(g, 1.0), 0.0}, VectorField(g), DiffusionMatrix(), 0.0), InvalidArgument);
}

TEST_CASE("mirror symmetry is preserved") {
  const Grid g(32, 24);
  const auto p = normalized(ScalarField::sample(g, [](double x, double y) {
    return 1.0 + 0.5 * std::cos(2 * pi * x) + 0.3 * y * std::cos(pi * x) * std::cos(pi * x);
  }));
  const VectorField v(ScalarField::sample(g, [](double x, double y) { return 0.2 * std::sin(2 * pi * x) * (1 + y); }),
                      ScalarField::sample(g, [](double x, double y) { return 0.1 * std::cos(2 * pi * x) * y; }));
  const auto D = DiffusionMatrix::isotropic(2e-4);
  FpkState s{p, 0.0};
  for (int n = 0; n < 200; ++n) s = fpk_step(s, v, D, 0.01);
  double asym = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) asym = std::max(asym, std::abs(s.p(i, j) - s.p(g.nx() - 1 - i, j)));
  CHECK(asym <= 1e-12);
}

TEST_CASE("run_fpk records the trajectory") {
  const Grid g(20, 20);
  const ScalarField u(g, 1.0);
  FpkRunOptions opt;
  opt.target = u;
  const auto tr = run_fpk(u, [&](double, const ScalarField&) { return VectorField(g); },
                          DiffusionMatrix::isotropic(1e-3), 0.02, 1.0, opt);
  CHECK(tr.times.size() == 51);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  for (double e : tr.l2_error) CHECK(e == 0.0);
  CHECK(tr.states.size() == 2);
}

TEST_CASE("pure diffusion relaxes to uniform") {
  const Grid g(24, 24);
  const auto p0 = normalized(ScalarField::sample(g, [](double x, double y) { return std::exp(-40 * ((x - 0.3) * (x - 0.3) + (y - 0.6) * (y - 0.6))); }));
  const double sigma0 = 0.05;
  const double dt = 0.25 / (2.0 * sigma0 * 2.0 * 24 * 24);
  const double T = 12.0 / (sigma0 * pi * pi);
  FpkRunOptions opt;
  opt.target = ScalarField(g, 1.0);
  const auto tr = run_fpk(p0, [&](double, const ScalarField&) { return VectorField(g); },
                          DiffusionMatrix::isotropic(sigma0), dt, T, opt);
  CHECK(tr.l2_error.back() < 1e-3);
}

TEST_CASE("closed loop density feedback never increases the error") {
  const Grid g(40, 40);
  ControlParams params;
  params.p_star = normalized(ScalarField::sample(g, [](double x, double y) {
    const double a = std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.3) * (y - 0.3)) / (2 * 0.0289));
    const double b = std::exp(-((x - 0.7) * (x - 0.7) + (y - 0.7) * (y - 0.7)) / (2 * 0.0289));
    return 0.2 + a + b;
  }));
  params.alpha = 0.003;
  const DiffusionMatrix D;
  FpkRunOptions opt;
  opt.target = params.p_star;
  const auto tr = run_fpk(ScalarField(g, 1.0), [&](double, const ScalarField& p) { return density_feedback(p, params, D); },
                          D, 0.02, 20.0, opt);
  double worst = 0.0;
  for (std::size_t n = 1; n < tr.l2_error.size(); ++n) worst = std::max(worst, tr.l2_error[n] - tr.l2_error[n - 1]);
  CHECK(worst <= 1e-9);
  CHECK(tr.l2_error.back() < tr.l2_error.front());
}
