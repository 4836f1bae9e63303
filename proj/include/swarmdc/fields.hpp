#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstddef>
#include <functional>
#include <vector>

namespace swarmdc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Cell-centred grid on the unit square. Node (i, j) sits at ((i+0.5)dx, (j+0.5)dy);
/// i runs along x1, j along x2, storage is row-major with rows of fixed x2.
class Grid {
 public:
  Grid() = default;
  Grid(int nx, int ny);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  double cell_area() const noexcept { return dx_ * dy_; }

  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx_ + i; }
  double x1(int i) const noexcept { return (i + 0.5) * dx_; }
  double x2(int j) const noexcept { return (j + 0.5) * dy_; }
  Vec2 node(int i, int j) const noexcept { return {x1(i), x2(j)}; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_;
  }

 private:
  int nx_ = 0;
  int ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double fill = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  /// Samples f at every node centre.
  static ScalarField sample(const Grid& grid, const std::function<double(double, double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Sum of values times cell area (midpoint quadrature of the integral over the square).
  double integral() const noexcept;
  double min() const noexcept;
  double max() const noexcept;
  bool all_finite() const noexcept;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a) noexcept;

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

struct VectorField {
  ScalarField c1;
  ScalarField c2;

  VectorField() = default;
  explicit VectorField(const Grid& grid) : c1(grid), c2(grid) {}
  VectorField(ScalarField a, ScalarField b);

  const Grid& grid() const noexcept { return c1.grid(); }
  Vec2 at(std::size_t k) const noexcept { return {c1[k], c2[k]}; }
  double max_abs() const noexcept;
};

/// 2x2 matrix per node; component (r, c) in row-major order.
struct TensorField {
  ScalarField c11, c12, c21, c22;

  TensorField() = default;
  explicit TensorField(const Grid& grid) : c11(grid), c12(grid), c21(grid), c22(grid) {}

  const Grid& grid() const noexcept { return c11.grid(); }
  Mat2 at(std::size_t k) const noexcept {
    Mat2 m;
    m << c11[k], c12[k], c21[k], c22[k];
    return m;
  }
};

/// Constant diffusion: sigma = 0.5 * g1 * g1^T.
class DiffusionMatrix {
 public:
  DiffusionMatrix() : sigma_(Mat2::Zero()), g1_(Mat2::Zero()) {}

  static DiffusionMatrix isotropic(double sigma0);
  /// g1 is taken as the lower Cholesky factor of 2*sigma; sigma must be symmetric PSD.
  static DiffusionMatrix from_sigma(const Mat2& sigma);
  static DiffusionMatrix from_noise(const Mat2& g1);

  const Mat2& sigma() const noexcept { return sigma_; }
  const Mat2& g1() const noexcept { return g1_; }
  bool is_zero() const noexcept { return sigma_.isZero(0.0); }

 private:
  Mat2 sigma_;
  Mat2 g1_;
};

}  // namespace swarmdc
