#include "fdl/exact.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "fdl/errors.hpp"

namespace fdl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double kappa(double p, double q, int dim) {
  if (!(q > 1)) throw OutOfRegime("kappa: q must exceed 1");
  if (dim < 1) throw OutOfRegime("kappa: dimension must be >= 1");
  return 2.0 * p - dim * (q - 2.0) / (q - 1.0);
}

bool hypo_q_ok(double q, int dim) {
  if (!(q > 2)) throw OutOfRegime("hypo_q_ok applies to the fast-diffusion regime q > 2");
  if (dim <= 2) return true;
  return q < 2.0 * (dim - 1.0) / (dim - 2.0);
}

ZkbParams zkb_params(double q, int dim, double c_free) {
  if (!(q > 1 && q < 2)) throw OutOfRegime("ZKB profile exists for 1 < q < 2 only");
  if (!(c_free > 0)) throw OutOfRegime("ZKB constant C must be positive");
  if (dim != 1 && dim != 2) throw OutOfRegime("dimension must be 1 or 2");
  ZkbParams zp;
  zp.q = q;
  zp.dim = dim;
  zp.c_free = c_free;
  zp.d = (2.0 - q) / (q - 1.0);
  zp.alpha = dim / (2.0 + dim * zp.d);
  zp.beta = zp.alpha / dim;
  zp.k = zp.alpha * (2.0 - q) / (2.0 * dim);
  return zp;
}

double zkb_eval(const ZkbParams& zp, const FinslerEvaluator& ev, Vec x, double t) {
  if (!(t > 0)) throw NonpositiveTime("ZKB solution requires t > 0");
  if (ev.dim() != zp.dim) throw ShapeMismatch("evaluator dimension mismatch");
  const double rho = ev.dual_eval(x);
  const double bracket = zp.c_free - zp.k * rho * rho * std::pow(t, -2.0 * zp.beta);
  if (bracket <= 0) return 0;
  return std::pow(t, -zp.alpha / (zp.q - 1.0)) * std::pow(bracket, 1.0 / (2.0 - zp.q));
}

double zkb_support_radius(const ZkbParams& zp, double t) {
  if (!(t > 0)) throw NonpositiveTime("support radius requires t > 0");
  return std::sqrt(zp.c_free / zp.k) * std::pow(t, zp.beta);
}

double zkb_mass(const ZkbParams& zp, const FinslerEvaluator& ev, double t, double quad_h) {
  if (!(t > 0)) throw NonpositiveTime("mass requires t > 0");
  if (!(quad_h > 0)) throw NonpositiveSpacing("quadrature step must be positive");
  const double rad = zkb_support_radius(zp, t);
  const double ex = rad * ev.dual_ball_extent(0) * 1.0000001;
  const double ey = rad * (ev.dim() == 2 ? ev.dual_ball_extent(1) : 1.0) * 1.0000001;
  const double em1 = zp.q - 1.0;
  std::vector<double> cells;
  if (zp.dim == 1) {
    const int n = std::max(2, static_cast<int>(std::ceil(2 * ex / quad_h)));
    const double h = 2 * ex / n;
    cells.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double x = -ex + (i + 0.5) * h;
      const double u = zkb_eval(zp, ev, {x, 0}, t);
      cells.push_back(u > 0 ? std::pow(u, em1) * h : 0.0);
    }
  } else {
    const int nx = std::max(2, static_cast<int>(std::ceil(2 * ex / quad_h)));
    const int ny = std::max(2, static_cast<int>(std::ceil(2 * ey / quad_h)));
    const double hx = 2 * ex / nx, hy = 2 * ey / ny;
    cells.reserve(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
      const double y = -ey + (j + 0.5) * hy;
      for (int i = 0; i < nx; ++i) {
        const double x = -ex + (i + 0.5) * hx;
        const double u = zkb_eval(zp, ev, {x, y}, t);
        cells.push_back(u > 0 ? std::pow(u, em1) * hx * hy : 0.0);
      }
    }
  }
  return pairwise_sum(cells);
}

MajorantParams majorant_params_for(double q, int dim, double a0, double c1) {
  if (!(q > 1 && q < 2)) throw OutOfRegime("majorant exponents require 1 < q < 2");
  MajorantParams mp;
  mp.a0 = a0;
  mp.c1 = c1;
  mp.d = (2.0 - q) / (q - 1.0);
  mp.kappa = 2.0 + dim * mp.d;
  return mp;
}

double majorant_phi(const MajorantParams& mp, double t) {
  if (t < 0) throw NonpositiveTime("majorant defined for t >= 0");
  if (mp.a0 < 0 || mp.c1 < 0) throw OutOfRegime("majorant coefficients must be nonnegative");
  if (mp.a0 == 0) return 0;  // zero stays zero under the forcing h^{1/(q-1)}
  const double bracket =
      std::pow(mp.a0, -mp.d) - 0.5 * mp.d * mp.kappa * mp.c1 * std::pow(t, 2.0 / mp.kappa);
  if (bracket <= 0) return kInf;
  return std::pow(bracket, -1.0 / mp.d);
}

double majorant_phi_blowup_time(const MajorantParams& mp) {
  if (mp.c1 == 0 || mp.a0 == 0) return kInf;
  return std::pow(std::pow(mp.a0, -mp.d) * 2.0 / (mp.d * mp.kappa * mp.c1), 0.5 * mp.kappa);
}

double majorant_psi(double a0, double c5, double d, double kappa_, double t) {
  if (t < 0) throw NonpositiveTime("majorant defined for t >= 0");
  if (a0 < 0 || c5 < 0) throw OutOfRegime("majorant coefficients must be nonnegative");
  if (a0 == 0) return 0;
  const double bracket = std::pow(a0, -d / kappa_) - c5 * d * std::pow(t, 1.0 / kappa_);
  if (bracket <= 0) return kInf;
  return std::pow(bracket, -kappa_ / d);
}

double majorant_psi_blowup_time(double a0, double c5, double d, double kappa_) {
  if (c5 == 0 || a0 == 0) return kInf;
  return std::pow(std::pow(a0, -d / kappa_) / (c5 * d), kappa_);
}

OdeCompareResult ode_compare(const std::function<double(double)>& f,
                             const std::function<double(double)>& weight, double a_minus,
                             double a_plus, double t_end, double step) {
  if (!(a_minus < a_plus)) throw std::invalid_argument("ode_compare requires a_minus < a_plus");
  if (!(step > 0) || !(t_end > 0)) throw std::invalid_argument("ode_compare requires positive T, h");
  double lo = a_minus, hi = a_plus;
  OdeCompareResult res;
  res.ordered = true;
  for (double t = 0; t < t_end; t += step) {
    const double dt = std::min(step, t_end - t);
    const double w = dt * weight(t + 0.5 * dt);
    lo += w * f(lo);
    hi += w * f(hi);
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw StepTooLarge("Euler iterate left the finite range; reduce the step");
    if (!(lo < hi)) {
      res.ordered = false;
      res.first_violation_time = t + dt;
      return res;
    }
  }
  return res;
}

}  // namespace fdl
