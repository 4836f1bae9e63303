#include "swarmdc/field_ops.hpp"

#include <algorithm>
#include <cmath>

#include "swarmdc/error.hpp"

namespace swarmdc {
namespace {

void require_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InvalidArgument("operands live on different grids");
}

// First derivative along one axis of a strided line of n values.
template <class Get, class Put>
void diff_line(int n, double h, Get get, Put put) {
  const double inv2h = 1.0 / (2.0 * h);
  put(0, (4.0 * (get(1) - get(0)) - (get(2) - get(0))) * inv2h);
  for (int m = 1; m < n - 1; ++m) put(m, (get(m + 1) - get(m - 1)) * inv2h);
  put(n - 1, (4.0 * (get(n - 1) - get(n - 2)) - (get(n - 1) - get(n - 3))) * inv2h);
}

template <class Get, class Put>
void second_diff_line(int n, double h, Get get, Put put) {
  const double invh2 = 1.0 / (h * h);
  for (int m = 0; m < n; ++m) {
    const double lo = get(m == 0 ? 0 : m - 1);  // mirrored ghost at the wall
    const double hi = get(m == n - 1 ? n - 1 : m + 1);
    put(m, (lo - 2.0 * get(m) + hi) * invh2);
  }
}

}  // namespace

ScalarField d1(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j)
    diff_line(g.nx(), g.dx(), [&](int i) { return f(i, j); }, [&](int i, double v) { out(i, j) = v; });
  return out;
}

ScalarField d2(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int i = 0; i < g.nx(); ++i)
    diff_line(g.ny(), g.dy(), [&](int j) { return f(i, j); }, [&](int j, double v) { out(i, j) = v; });
  return out;
}

ScalarField d11(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j)
    second_diff_line(g.nx(), g.dx(), [&](int i) { return f(i, j); },
                     [&](int i, double v) { out(i, j) = v; });
  return out;
}

ScalarField d22(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int i = 0; i < g.nx(); ++i)
    second_diff_line(g.ny(), g.dy(), [&](int j) { return f(i, j); },
                     [&](int j, double v) { out(i, j) = v; });
  return out;
}

ScalarField d12(const ScalarField& f) { return d1(d2(f)); }

VectorField gradient(const ScalarField& f) { return VectorField(d1(f), d2(f)); }

ScalarField divergence(const VectorField& F) {
  require_same(F.c1.grid(), F.c2.grid());
  return d1(F.c1) + d2(F.c2);
}

ScalarField laplacian(const ScalarField& f) { return d11(f) + d22(f); }

TensorField jacobian(const VectorField& V) {
  require_same(V.c1.grid(), V.c2.grid());
  TensorField J;
  J.c11 = d1(V.c1);
  J.c12 = d2(V.c1);
  J.c21 = d1(V.c2);
  J.c22 = d2(V.c2);
  return J;
}

VectorField sigma_flux(const ScalarField& p, const DiffusionMatrix& D) {
  const Mat2& s = D.sigma();
  const ScalarField p1 = d1(p);
  const ScalarField p2 = d2(p);
  VectorField out(p.grid());
  for (std::size_t k = 0; k < p.size(); ++k) {
    out.c1[k] = s(0, 0) * p1[k] + s(0, 1) * p2[k];
    out.c2[k] = s(1, 0) * p1[k] + s(1, 1) * p2[k];
  }
  return out;
}

ScalarField sigma_hessian_trace(const ScalarField& f, const Mat2& sigma) {
  ScalarField out(f.grid());
  if (sigma(0, 0) != 0.0) out += sigma(0, 0) * d11(f);
  if (sigma(1, 1) != 0.0) out += sigma(1, 1) * d22(f);
  const double mixed = sigma(0, 1) + sigma(1, 0);
  if (mixed != 0.0) out += mixed * d12(f);
  return out;
}

BilinearWeights BilinearWeights::at(const Grid& g, const Vec2& x) {
  if (!(x.x() >= 0.0 && x.x() <= 1.0 && x.y() >= 0.0 && x.y() <= 1.0)) {
    throw InvalidArgument("sample point outside the unit square");
  }
  // Snap rounding noise so node centres reproduce node values exactly.
  auto snap = [](double u) {
    const double r = std::round(u);
    return std::abs(u - r) < 1e-12 ? r : u;
  };
  const double s = snap(x.x() * g.nx() - 0.5);
  const double t = snap(x.y() * g.ny() - 0.5);
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, g.nx() - 2);
  const int j = std::clamp(static_cast<int>(std::floor(t)), 0, g.ny() - 2);
  // Beyond the outermost centres the value is held constant (no extrapolation), so a
  // sample never leaves the range of its four node values.
  const double a = std::clamp(s - i, 0.0, 1.0);
  const double b = std::clamp(t - j, 0.0, 1.0);
  BilinearWeights w;
  w.k00 = g.index(i, j);
  w.k10 = g.index(i + 1, j);
  w.k01 = g.index(i, j + 1);
  w.k11 = g.index(i + 1, j + 1);
  w.w00 = (1.0 - a) * (1.0 - b);
  w.w10 = a * (1.0 - b);
  w.w01 = (1.0 - a) * b;
  w.w11 = a * b;
  return w;
}

double sample_bilinear(const ScalarField& f, const Vec2& point) {
  return BilinearWeights::at(f.grid(), point).apply(f);
}

Vec2 sample_bilinear(const VectorField& F, const Vec2& point) {
  const auto w = BilinearWeights::at(F.grid(), point);
  return {w.apply(F.c1), w.apply(F.c2)};
}

Mat2 sample_bilinear(const TensorField& T, const Vec2& point) {
  const auto w = BilinearWeights::at(T.grid(), point);
  Mat2 m;
  m << w.apply(T.c11), w.apply(T.c12), w.apply(T.c21), w.apply(T.c22);
  return m;
}

double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_area());
}

double l1_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += std::abs(v);
  return s * f.grid().cell_area();
}

}  // namespace swarmdc
