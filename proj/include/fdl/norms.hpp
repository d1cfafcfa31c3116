#pragma once

#include <cstdint>

#include "fdl/common.hpp"

namespace fdl {

enum class NormKind { Euclidean, PNorm, Anisotropic };

// Description of the norm H. PNorm requires an exponent strictly inside
// (1, inf): at s = 1 or s = inf the unit ball loses strict convexity and the
// dual norm its C^1 regularity away from 0, which the flux formulas rely on.
// Anisotropic means H(xi) = sqrt(xi . A xi) with A symmetric positive definite.
struct NormSpec {
  NormKind kind = NormKind::Euclidean;
  int dim = 1;          // 1 or 2
  double exponent = 2;  // PNorm only
  SymMat a;             // Anisotropic only (1D uses a.m00)

  static NormSpec euclidean(int dim);
  static NormSpec pnorm(int dim, double s);
  static NormSpec anisotropic(int dim, double a00, double a01, double a11);
};

// Worst residuals over a random sample of the identities the flux analysis
// rests on: the Cauchy-Schwarz-type duality bound, the Euler identity
// xi . grad H = H, H_0(grad H) = 1, H_0(flux) = H, and monotonicity of the
// flux map.
struct NormIdentityReport {
  int samples = 0;
  double max_euler_residual = 0;       // relative
  double max_dual_grad_residual = 0;   // |H0(grad H) - 1|
  double max_flux_dual_residual = 0;   // relative |H0(a(xi)) - H(xi)|
  double max_duality_violation = 0;    // (|x.xi| - H0(x)H(xi)) / scale, positive part
  double min_monotone_pairing = 0;     // min (a(xi)-a(eta)).(xi-eta) / (|xi|+|eta|)^2
  Vec worst_euler_arg{0, 0};
  Vec worst_mono_arg{0, 0};

  bool pass(double residual_tol, double monotone_tol) const {
    return max_euler_residual <= residual_tol && max_dual_grad_residual <= residual_tol &&
           max_flux_dual_residual <= residual_tol && max_duality_violation <= residual_tol &&
           min_monotone_pairing >= -monotone_tol;
  }
};

class FinslerEvaluator {
 public:
  explicit FinslerEvaluator(const NormSpec& spec);

  int dim() const { return spec_.dim; }
  const NormSpec& spec() const { return spec_; }

  double eval(Vec xi) const;       // H(xi)
  double dual_eval(Vec x) const;   // H_0(x), closed form per variant
  Vec grad(Vec xi) const;          // grad H, throws ZeroVector at xi = 0
  Vec flux(Vec xi) const;          // a(xi) = H(xi) grad H(xi), continuous at 0

  // Derivative of the flux map (Hessian of H^2/2), symmetric PSD. Where the
  // true derivative is singular (xi near 0, or on axes for exponent < 2) a
  // PSD surrogate is substituted; callers use this for Newton systems only,
  // never for residuals.
  SymMat flux_jacobian(Vec xi) const;

  bool in_ball(Vec x, double radius) const;  // H_0(x) < radius
  double ball_volume(double radius) const;   // volume of {H_0 < radius}
  // sup of |x_axis| over the unit dual ball: its bounding-box half extent.
  double dual_ball_extent(int axis) const;

  // Direction-scan maximizer of x.xi/H(xi); test oracle for dual_eval.
  double dual_eval_bruteforce(Vec x, int scan_points) const;

 private:
  NormSpec spec_;
  double dual_exponent_ = 2;   // conjugate exponent for PNorm
  SymMat a_inv_;               // inverse matrix for Anisotropic
  double unit_dual_volume_ = 0;  // volume of {H_0 < 1}
};

NormIdentityReport verify_identities(const FinslerEvaluator& ev, int n_samples, uint64_t seed);

}  // namespace fdl
