#include "swarmdc/fields.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmdc/error.hpp"

namespace swarmdc {

Grid::Grid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 4 || ny < 4) {
    throw InvalidArgument("grid needs at least 4 cells per axis, got " + std::to_string(nx) +
                          "x" + std::to_string(ny));
  }
  dx_ = 1.0 / nx;
  dy_ = 1.0 / ny;
}

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid has " +
                          std::to_string(grid_.size()) + " nodes");
  }
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) out(i, j) = f(grid.x1(i), grid.x2(j));
  return out;
}

double ScalarField::integral() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_area();
}

double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  if (!(grid_ == o.grid_)) throw InvalidArgument("field grids differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  if (!(grid_ == o.grid_)) throw InvalidArgument("field grids differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double a) noexcept {
  for (double& v : values_) v *= a;
  return *this;
}

VectorField::VectorField(ScalarField a, ScalarField b) : c1(std::move(a)), c2(std::move(b)) {
  if (!(c1.grid() == c2.grid())) throw InvalidArgument("vector field components on different grids");
}

double VectorField::max_abs() const noexcept {
  double m = 0.0;
  for (std::size_t k = 0; k < c1.size(); ++k) m = std::max(m, std::hypot(c1[k], c2[k]));
  return m;
}

DiffusionMatrix DiffusionMatrix::isotropic(double sigma0) {
  if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) {
    throw InvalidArgument("diffusion coefficient must be finite and non-negative");
  }
  DiffusionMatrix d;
  d.sigma_ = sigma0 * Mat2::Identity();
  d.g1_ = std::sqrt(2.0 * sigma0) * Mat2::Identity();
  return d;
}

DiffusionMatrix DiffusionMatrix::from_sigma(const Mat2& sigma) {
  if (!sigma.allFinite() || sigma(0, 1) != sigma(1, 0)) {
    throw InvalidArgument("diffusion matrix must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat2> es(2.0 * sigma);
  Eigen::Vector2d ev = es.eigenvalues();
  const double tol = 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -tol) throw InvalidArgument("diffusion matrix is not positive semidefinite");
  ev = ev.cwiseMax(0.0);
  DiffusionMatrix d;
  d.sigma_ = sigma;
  d.g1_ = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return d;
}

DiffusionMatrix DiffusionMatrix::from_noise(const Mat2& g1) {
  if (!g1.allFinite()) throw InvalidArgument("noise matrix must be finite");
  DiffusionMatrix d;
  d.g1_ = g1;
  d.sigma_ = 0.5 * g1 * g1.transpose();
  d.sigma_(1, 0) = d.sigma_(0, 1);
  return d;
}

}  // namespace swarmdc
