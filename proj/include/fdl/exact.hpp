#pragma once

#include <functional>

#include "fdl/norms.hpp"

namespace fdl {

// Structural exponent kappa_p = 2p - N(q-2)/(q-1).
double kappa(double p, double q, int dim);

// Growth condition q < 2(N-1)/(N-2)_+ for the fast-diffusion regime; the
// right side is +inf for N <= 2, so the inequality never binds there.
bool hypo_q_ok(double q, int dim);

// Self-similar solution parameters for 1 < q < 2.
struct ZkbParams {
  double q = 1.5;
  int dim = 1;
  double c_free = 1;  // the free profile constant C
  double alpha = 0, beta = 0, k = 0;
  double d = 0;  // (2-q)/(q-1)
};

ZkbParams zkb_params(double q, int dim, double c_free);

// u(x,t) = t^{-alpha/(q-1)} (C - k H_0(x)^2 t^{-2 beta})_+^{1/(2-q)}
double zkb_eval(const ZkbParams& zp, const FinslerEvaluator& ev, Vec x, double t);

// Interface location: H_0(x) = sqrt(C/k) t^beta.
double zkb_support_radius(const ZkbParams& zp, double t);

// Midpoint quadrature of u(.,t)^{q-1} over the support ball; conserved in t.
double zkb_mass(const ZkbParams& zp, const FinslerEvaluator& ev, double t, double quad_h);

// Closed-form supersolution of h' = c1 t^{-N d / kappa} h^{1/(q-1)},
// h(0) = a0: h(t) = [a0^{-d} - (d kappa / 2) c1 t^{2/kappa}]_+^{-1/d}.
// Past the bracket zero the value is +infinity.
struct MajorantParams {
  double a0 = 1;
  double c1 = 0;  // forcing coefficient
  double d = 1;
  double kappa = 3;
};
MajorantParams majorant_params_for(double q, int dim, double a0, double c1);

double majorant_phi(const MajorantParams& mp, double t);
double majorant_phi_blowup_time(const MajorantParams& mp);  // +inf when c1 == 0

// Companion family for g' = c5 t^{1/kappa - 1} g^{1 + d/kappa}, g(0) = a0:
// g(t) = [a0^{-d/kappa} - c5 d t^{1/kappa}]_+^{-kappa/d}.
double majorant_psi(double a0, double c5, double d, double kappa, double t);
double majorant_psi_blowup_time(double a0, double c5, double d, double kappa);

// Numerical comparison of the two integral inequalities
//   phi_-(t) <= a_- + int_0^t k f(phi_-),  phi_+(t) >= a_+ + int_0^t k f(phi_+)
// via explicit Euler at step h; the per-step weight is h k(midpoint), which
// handles integrable endpoint singularities of k. First-order accurate; this
// is a test oracle, not a production integrator.
struct OdeCompareResult {
  bool ordered = false;
  double first_violation_time = -1;
};
OdeCompareResult ode_compare(const std::function<double(double)>& f,
                             const std::function<double(double)>& weight, double a_minus,
                             double a_plus, double t_end, double step);

}  // namespace fdl
