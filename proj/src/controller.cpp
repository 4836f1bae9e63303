#include "swarmdc/controller.hpp"

#include <cmath>
#include <sstream>

#include "swarmdc/error.hpp"
#include "swarmdc/field_ops.hpp"

namespace swarmdc {

void ControlParams::validate() const {
  if (!(alpha > 0.0) || !(k > 0.0) || !(eps1 > 0.0) || !(eps2 > 0.0)) {
    throw InvalidArgument("control gains alpha, k, eps1, eps2 must be positive");
  }
  if (p_star.size() == 0) throw InvalidArgument("target density is missing");
  if (std::abs(p_star.integral() - 1.0) > 1e-6) throw InvalidArgument("target density must have unit mass");
  if (!(p_star.min() > 0.0) || !p_star.all_finite()) {
    throw InvalidArgument("target density must be finite and bounded away from zero");
  }
}

Vec2 InputTerms::held_input(double dt) const {
  if (!(dt > 0.0)) throw InvalidArgument("hold interval must be positive");
  const double effective = -std::expm1(-damping * dt) / dt;
  return feedforward - effective * v_tilde;
}

VectorField density_feedback(const ScalarField& p, const ControlParams& params, const DiffusionMatrix& D) {
  if (!(p.grid() == params.p_star.grid())) throw InvalidArgument("density and target grids differ");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] > 0.0)) {
      std::ostringstream os;
      os << "density feedback needs p > 0, node " << k << " has " << p[k];
      throw InvalidArgument(os.str());
    }
  }
  const VectorField grad_err = gradient(p - params.p_star);
  const VectorField flux = sigma_flux(p, D);
  VectorField v(p.grid());
  for (std::size_t k = 0; k < p.size(); ++k) {
    v.c1[k] = -(params.alpha * grad_err.c1[k] - flux.c1[k]) / p[k];
    v.c2[k] = -(params.alpha * grad_err.c2[k] - flux.c2[k]) / p[k];
  }
  return v;
}

ControlFields build_control_fields(const VectorField& v_d_now, const std::optional<VectorField>& v_d_prev,
                                   double dt, const DiffusionMatrix& D, const ScalarField& p,
                                   const ControlParams& params) {
  if (!(dt > 0.0)) throw InvalidArgument("control period must be positive");
  const Grid& g = v_d_now.grid();
  if (!(p.grid() == g) || !(params.p_star.grid() == g)) throw InvalidArgument("control inputs on different grids");

  ControlFields cf;
  cf.v_d = v_d_now;
  cf.dv_d_dt = VectorField(g);
  if (v_d_prev) {
    if (!(v_d_prev->grid() == g)) throw InvalidArgument("previous feedback field on a different grid");
    cf.dv_d_dt.c1 = (1.0 / dt) * (v_d_now.c1 - v_d_prev->c1);
    cf.dv_d_dt.c2 = (1.0 / dt) * (v_d_now.c2 - v_d_prev->c2);
  }
  cf.jac_v_d = jacobian(v_d_now);
  // 0.5 Tr(g1^T H g1) = sum_ab sigma_ab H_ab
  cf.G = VectorField(sigma_hessian_trace(v_d_now.c1, D.sigma()), sigma_hessian_trace(v_d_now.c2, D.sigma()));

  const VectorField grad_err = gradient(p - params.p_star);
  cf.grad_phi_term = ScalarField(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = p[k] * grad_err.c1[k];
    const double b = p[k] * grad_err.c2[k];
    const double sq = a * a + b * b;
    cf.grad_phi_term[k] = sq * sq;
  }
  return cf;
}

ControlSample sample_control(const ControlFields& cf, const Vec2& x) {
  const auto w = BilinearWeights::at(cf.v_d.grid(), x);
  ControlSample s;
  s.v_d = {w.apply(cf.v_d.c1), w.apply(cf.v_d.c2)};
  s.dv_d_dt = {w.apply(cf.dv_d_dt.c1), w.apply(cf.dv_d_dt.c2)};
  s.jac_v_d << w.apply(cf.jac_v_d.c11), w.apply(cf.jac_v_d.c12), w.apply(cf.jac_v_d.c21),
      w.apply(cf.jac_v_d.c22);
  s.G = {w.apply(cf.G.c1), w.apply(cf.G.c2)};
  s.grad_phi_term = w.apply(cf.grad_phi_term);
  return s;
}

AgentChannel make_channel(const Mat2& g2, const Vec2& x, const Vec2& v, const ControlFields& cf) {
  return {g2, v - sample_bilinear(cf.v_d, x)};
}

InputTerms backstepping_terms(const ControlSample& s, const Vec2& v, const AgentChannel& ch,
                              const ControlParams& params, const DiffusionMatrix& D) {
  InputTerms t;
  t.v_tilde = ch.v_tilde;
  t.feedforward = s.dv_d_dt + s.jac_v_d * v + s.G;
  const Mat2 A = ch.g2 - s.jac_v_d * D.g1();
  const double tr = (A.transpose() * A).trace();
  const double e1 = params.eps1 * params.eps1;
  t.damping = params.k + s.grad_phi_term / (4.0 * e1 * e1) + 3.0 * tr * tr / (4.0 * params.eps2 * params.eps2);
  if (!t.feedforward.allFinite() || !std::isfinite(t.damping) || !t.v_tilde.allFinite()) {
    throw NumericError("non-finite control field sample");
  }
  return t;
}

Vec2 backstepping_input(const Vec2& x, const Vec2& v, const ControlFields& cf, const AgentChannel& ch,
                        const ControlParams& params, const DiffusionMatrix& D) {
  return backstepping_terms(sample_control(cf, x), v, ch, params, D).input();
}

}  // namespace swarmdc
