#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "swarmdc/error.hpp"
#include "swarmdc/field_ops.hpp"
#include "swarmdc/fields.hpp"

using namespace swarmdc;
using std::numbers::pi;

namespace {

bool interior(const Grid& g, int i, int j) { return i > 0 && j > 0 && i < g.nx() - 1 && j < g.ny() - 1; }

template <class Fn>
double max_interior(const Grid& g, Fn&& err) {
  double m = 0.0;
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) m = std::max(m, std::abs(err(i, j)));
  return m;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g(30, 20);
  CHECK(g.size() == 600);
  CHECK(g.dx() == doctest::Approx(1.0 / 30));
  CHECK(g.x1(0) == doctest::Approx(0.5 / 30));
  CHECK(g.x2(19) == doctest::Approx(1.0 - 0.5 / 20));
  CHECK(g.index(3, 2) == 63);
  CHECK_THROWS_AS(Grid(3, 10), InvalidArgument);
}

TEST_CASE("gradient of affine and constant fields") {
  const Grid g(16, 12);
  const auto f = ScalarField::sample(g, [](double x, double y) { return 3.0 * x - 2.0 * y + 1.0; });
  const auto grad = gradient(f);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(grad.c1[k] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(grad.c2[k] == doctest::Approx(-2.0).epsilon(1e-12));
  }
  const auto zero = gradient(ScalarField(g, 4.0));
  CHECK(zero.max_abs() == 0.0);
}

TEST_CASE("divergence") {
  const Grid g(64, 64);
  const VectorField id(ScalarField::sample(g, [](double x, double) { return x; }),
                       ScalarField::sample(g, [](double, double y) { return y; }));
  const auto div = divergence(id);
  CHECK(max_interior(g, [&](int i, int j) { return div(i, j) - 2.0; }) < 1e-12);
  CHECK(divergence(VectorField(ScalarField(g, 0.7), ScalarField(g, 0.7))).values() ==
        std::vector<double>(g.size(), 0.0));

  const VectorField s(ScalarField::sample(g, [](double x, double) { return std::sin(pi * x); }), ScalarField(g));
  const auto ds = divergence(s);
  const double err = max_interior(g, [&](int i, int j) { return ds(i, j) - pi * std::cos(pi * g.x1(i)); });
  CHECK(err < pi * pi * pi * g.dx() * g.dx() / 6.0 * 1.01);
}

TEST_CASE("laplacian") {
  const Grid g(64, 64);
  const auto affine = ScalarField::sample(g, [](double x, double y) { return x + 2.0 * y; });
  const auto la = laplacian(affine);
  CHECK(max_interior(g, [&](int i, int j) { return la(i, j); }) < 1e-9);

  const auto c = laplacian(ScalarField(g, 2.5));
  for (double v : c.values()) CHECK(v == 0.0);

  const auto f = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const auto lf = laplacian(f);
  for (int i = 0; i < g.nx(); ++i) {
    const double exact = -pi * pi * std::cos(pi * g.x1(i));
    CHECK(std::abs(lf(i, 7) - exact) <= 0.01 * pi * pi);
  }
}

TEST_CASE("jacobian") {
  const Grid g(20, 20);
  const VectorField lin(ScalarField::sample(g, [](double x, double) { return 1.5 * x; }),
                        ScalarField::sample(g, [](double, double y) { return -0.5 * y; }));
  const auto J = jacobian(lin);
  const VectorField rot(ScalarField::sample(g, [](double, double y) { return y; }),
                        ScalarField::sample(g, [](double x, double) { return -x; }));
  const auto R = jacobian(rot);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const auto k = g.index(i, j);
      Mat2 a;
      a << 1.5, 0.0, 0.0, -0.5;
      CHECK((J.at(k) - a).cwiseAbs().maxCoeff() < 1e-12);
      Mat2 b;
      b << 0.0, 1.0, -1.0, 0.0;
      CHECK((R.at(k) - b).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  const auto Z = jacobian(VectorField(ScalarField(g, 1.0), ScalarField(g, -3.0)));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(Z.at(k).isZero(0.0));
}

TEST_CASE("second-order convergence of the stencils") {
  auto errors = [](int n) {
    const Grid g(n, n);
    auto fx = [](double x, double y) { return std::sin(pi * x) * std::cos(2.0 * pi * y); };
    const auto f = ScalarField::sample(g, fx);
    const auto grad = gradient(f);
    const auto lap = laplacian(f);
    const auto J = jacobian(VectorField(f, ScalarField::sample(g, [](double x, double y) { return x * x * std::sin(pi * y); })));
    double eg = 0, el = 0, ej = 0;
    for (int j = 1; j < n - 1; ++j) {
      for (int i = 1; i < n - 1; ++i) {
        const double x = g.x1(i), y = g.x2(j);
        const auto k = g.index(i, j);
        eg = std::max(eg, std::abs(grad.c1[k] - pi * std::cos(pi * x) * std::cos(2 * pi * y)));
        eg = std::max(eg, std::abs(grad.c2[k] + 2 * pi * std::sin(pi * x) * std::sin(2 * pi * y)));
        el = std::max(el, std::abs(lap[k] + 5 * pi * pi * fx(x, y)));
        ej = std::max(ej, std::abs(J.c21[k] - 2 * x * std::sin(pi * y)));
        ej = std::max(ej, std::abs(J.c22[k] - pi * x * x * std::cos(pi * y)));
      }
    }
    return std::array<double, 3>{eg, el, ej};
  };
  const auto coarse = errors(32), fine = errors(64);
  for (int m = 0; m < 3; ++m) CHECK(coarse[m] / fine[m] >= 3.5);
}

TEST_CASE("sigma flux and hessian trace") {
  const Grid g(24, 24);
  CHECK(sigma_flux(ScalarField(g, 1.0), DiffusionMatrix::isotropic(1e-3)).max_abs() == 0.0);

  const auto px = ScalarField::sample(g, [](double x, double) { return x; });
  const auto f1 = sigma_flux(px, DiffusionMatrix::isotropic(2e-3));
  Mat2 s;
  s << 2e-3, 1e-3, 1e-3, 2e-3;
  const auto f2 = sigma_flux(ScalarField::sample(g, [](double x, double y) { return x + y; }),
                             DiffusionMatrix::from_sigma(s));
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const auto k = g.index(i, j);
      CHECK(f1.c1[k] == doctest::Approx(2e-3).epsilon(1e-12));
      CHECK(std::abs(f1.c2[k]) < 1e-15);
      CHECK(f2.c1[k] == doctest::Approx(3e-3).epsilon(1e-12));
      CHECK(f2.c2[k] == doctest::Approx(3e-3).epsilon(1e-12));
    }
  }

  const auto f = ScalarField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
  const auto iso = sigma_hessian_trace(f, 1e-3 * Mat2::Identity());
  const auto lap = laplacian(f);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(iso[k] == doctest::Approx(1e-3 * lap[k]).epsilon(1e-12));
}

TEST_CASE("diffusion matrix") {
  const auto D = DiffusionMatrix::isotropic(1e-4);
  CHECK(D.sigma()(0, 0) == doctest::Approx(1e-4));
  CHECK(D.g1()(1, 1) == doctest::Approx(std::sqrt(2e-4)));
  CHECK(D.g1()(0, 1) == 0.0);
  Mat2 s;
  s << 2e-3, 1e-3, 1e-3, 3e-3;
  const auto A = DiffusionMatrix::from_sigma(s);
  CHECK(((0.5 * A.g1() * A.g1().transpose()) - s).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(DiffusionMatrix().is_zero());
  Mat2 bad;
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(DiffusionMatrix::from_sigma(bad), InvalidArgument);
}

TEST_CASE("bilinear sampling") {
  const Grid g(64, 64);
  const auto affine = ScalarField::sample(g, [](double x, double y) { return 2.0 * x - y + 0.25; });
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(g.dx() / 2, 1.0 - g.dx() / 2);
  for (int n = 0; n < 200; ++n) {
    const Vec2 x{u(gen), u(gen)};
    CHECK(sample_bilinear(affine, x) == doctest::Approx(2.0 * x.x() - x.y() + 0.25).epsilon(1e-12));
  }

  const auto noisy = ScalarField::sample(g, [](double x, double y) { return std::sin(37.0 * x * y) + x; });
  for (int j = 0; j < g.ny(); j += 7)
    for (int i = 0; i < g.nx(); i += 5) CHECK(sample_bilinear(noisy, g.node(i, j)) == noisy(i, j));

  const auto s = ScalarField::sample(g, [](double x, double) { return std::sin(pi * x); });
  const double bound = pi * pi * g.dx() * g.dx() / 8.0;
  for (int n = 0; n < 500; ++n) {
    const Vec2 x{u(gen), u(gen)};
    CHECK(std::abs(sample_bilinear(s, x) - std::sin(pi * x.x())) <= bound);
  }

  // Border strip: the sample stays within the range of the nearest node values.
  const auto steep = ScalarField::sample(g, [](double x, double y) { return std::exp(10.0 * (x + y)); });
  const double edge = sample_bilinear(steep, Vec2{1.0, 1.0});
  CHECK(edge == steep(g.nx() - 1, g.ny() - 1));
  CHECK(sample_bilinear(steep, Vec2{0.0, 0.5}) > 0.0);

  CHECK_THROWS_AS(sample_bilinear(s, Vec2{1.01, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(sample_bilinear(s, Vec2{0.5, -1e-9}), InvalidArgument);
}

TEST_CASE("norms") {
  const Grid g(64, 64);
  CHECK(l2_norm(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm(ScalarField(g, 0.0)) == 0.0);
  const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  CHECK(std::abs(l2_norm(c) - 1.0 / std::sqrt(2.0)) <= 1e-3);
  CHECK(l2_norm(-3.0 * c) == doctest::Approx(3.0 * l2_norm(c)).epsilon(1e-14));
  CHECK(l1_norm(ScalarField(g, -2.0)) == doctest::Approx(2.0));
}

TEST_CASE("field arithmetic checks grids") {
  ScalarField a(Grid(8, 8), 1.0);
  const ScalarField b(Grid(8, 9), 1.0);
  CHECK_THROWS_AS(a += b, InvalidArgument);
  CHECK((a + a).integral() == doctest::Approx(2.0));
  CHECK_THROWS_AS(ScalarField(Grid(8, 8), std::vector<double>(10)), InvalidArgument);
}
