#pragma once

#include "swarmdc/fields.hpp"

namespace swarmdc {

// Finite-difference operators on cell-centred fields.
//
// First derivatives: central differences inside, second-order one-sided
// differences on the outermost nodes. Second derivatives along an axis use the
// 3-point stencil with mirrored ghost values (zero normal derivative) at the
// walls. All of them are exact on affine data at interior nodes.

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& F);
ScalarField laplacian(const ScalarField& f);

/// Row r holds the gradient of component r: J(r, c) = d V_r / d x_c.
TensorField jacobian(const VectorField& V);

ScalarField d1(const ScalarField& f);   // d/dx1
ScalarField d2(const ScalarField& f);   // d/dx2
ScalarField d11(const ScalarField& f);  // mirrored-ghost second difference along x1
ScalarField d22(const ScalarField& f);
ScalarField d12(const ScalarField& f);  // d/dx1 of d/dx2

/// sigma * grad p. With constant sigma this is the flux term sum_k d_k(sigma_jk p).
VectorField sigma_flux(const ScalarField& p, const DiffusionMatrix& D);

/// sum_ab sigma_ab d_a d_b f. Equals sigma0 * laplacian(f) for sigma = sigma0 * I.
ScalarField sigma_hessian_trace(const ScalarField& f, const Mat2& sigma);

/// Bilinear interpolation between the four surrounding cell centres. Points in the
/// half-cell border strip are clamped onto the nearest interpolation cell, so the
/// result always lies between the node values. Throws InvalidArgument outside the
/// closed unit square.
double sample_bilinear(const ScalarField& f, const Vec2& point);
Vec2 sample_bilinear(const VectorField& F, const Vec2& point);
Mat2 sample_bilinear(const TensorField& T, const Vec2& point);

/// Precomputed interpolation stencil, so several fields can be read at one point.
struct BilinearWeights {
  std::size_t k00, k10, k01, k11;
  double w00, w10, w01, w11;

  static BilinearWeights at(const Grid& grid, const Vec2& point);
  double apply(const ScalarField& f) const noexcept {
    return w00 * f[k00] + w10 * f[k10] + w01 * f[k01] + w11 * f[k11];
  }
};

/// (sum f^2 dx dy)^(1/2).
double l2_norm(const ScalarField& f);
/// sum |f| dx dy.
double l1_norm(const ScalarField& f);

}  // namespace swarmdc
