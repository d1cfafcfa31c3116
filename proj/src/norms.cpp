#include "fdl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/errors.hpp"

namespace fdl {

namespace {

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw BadNormSpec("dimension must be 1 or 2");
}

// |t|^{p-1} sgn(t); finite for p >= 1 including t = 0.
double signed_pow(double t, double pm1) {
  if (t == 0) return 0;
  return std::copysign(std::pow(std::abs(t), pm1), t);
}

// Area of the plane p-norm unit ball by Simpson quadrature of the quarter arc.
double pball_unit_area(double p) {
  const int n = 4096;  // even
  const double h = 1.0 / n;
  double s = 0;
  auto f = [p](double x) { return std::pow(1.0 - std::pow(x, p), 1.0 / p); };
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    s += w * f(std::min(1.0, i * h));
  }
  return 4.0 * s * h / 3.0;
}

}  // namespace

NormSpec NormSpec::euclidean(int dim) {
  check_dim(dim);
  NormSpec s;
  s.kind = NormKind::Euclidean;
  s.dim = dim;
  return s;
}

NormSpec NormSpec::pnorm(int dim, double p) {
  check_dim(dim);
  if (!(p > 1.0) || !std::isfinite(p))
    throw BadNormSpec("pnorm exponent must lie strictly inside (1, inf)");
  NormSpec s;
  s.kind = NormKind::PNorm;
  s.dim = dim;
  s.exponent = p;
  return s;
}

NormSpec NormSpec::anisotropic(int dim, double a00, double a01, double a11) {
  check_dim(dim);
  NormSpec s;
  s.kind = NormKind::Anisotropic;
  s.dim = dim;
  s.a = {a00, dim == 2 ? a01 : 0.0, dim == 2 ? a11 : 0.0};
  if (dim == 1) {
    if (!(a00 > 0)) throw BadNormSpec("anisotropic 1x1 matrix must be positive");
  } else {
    // symmetric storage; positive definiteness via leading minors
    if (!(a00 > 0) || !(a00 * a11 - a01 * a01 > 0))
      throw BadNormSpec("anisotropic matrix must be symmetric positive definite");
  }
  return s;
}

FinslerEvaluator::FinslerEvaluator(const NormSpec& spec) : spec_(spec) {
  switch (spec_.kind) {
    case NormKind::Euclidean:
      break;
    case NormKind::PNorm: {
      const double p = spec_.exponent;
      if (!(p > 1.0) || !std::isfinite(p)) throw BadNormSpec("pnorm exponent out of (1, inf)");
      dual_exponent_ = p / (p - 1.0);
      break;
    }
    case NormKind::Anisotropic: {
      if (spec_.dim == 1) {
        a_inv_ = {1.0 / spec_.a.m00, 0, 0};
      } else {
        const double det = spec_.a.m00 * spec_.a.m11 - spec_.a.m01 * spec_.a.m01;
        if (!(det > 0) || !(spec_.a.m00 > 0)) throw BadNormSpec("matrix not positive definite");
        a_inv_ = {spec_.a.m11 / det, -spec_.a.m01 / det, spec_.a.m00 / det};
      }
      break;
    }
  }
  // Unit dual-ball volume, cached for ball_volume().
  if (spec_.dim == 1) {
    // H(xi) = c |xi| for every variant; dual ball of radius 1 is (-c, c).
    const double c = eval({1, 0});
    unit_dual_volume_ = 2.0 * c;
  } else {
    switch (spec_.kind) {
      case NormKind::Euclidean:
        unit_dual_volume_ = M_PI;
        break;
      case NormKind::Anisotropic: {
        // {x . A^{-1} x < 1} is an ellipse of area pi sqrt(det A)
        const double det = spec_.a.m00 * spec_.a.m11 - spec_.a.m01 * spec_.a.m01;
        unit_dual_volume_ = M_PI * std::sqrt(det);
        break;
      }
      case NormKind::PNorm:
        unit_dual_volume_ = pball_unit_area(dual_exponent_);
        break;
    }
  }
}

double FinslerEvaluator::eval(Vec xi) const {
  switch (spec_.kind) {
    case NormKind::Euclidean:
      return spec_.dim == 1 ? std::abs(xi[0]) : std::hypot(xi[0], xi[1]);
    case NormKind::PNorm: {
      const double p = spec_.exponent;
      if (spec_.dim == 1) return std::abs(xi[0]);
      const double ax = std::abs(xi[0]), ay = std::abs(xi[1]);
      const double m = std::max(ax, ay);
      if (m == 0) return 0;
      // factor out the max to avoid overflow/underflow for extreme inputs
      return m * std::pow(std::pow(ax / m, p) + std::pow(ay / m, p), 1.0 / p);
    }
    case NormKind::Anisotropic:
      return std::sqrt(std::max(0.0, dot(xi, spec_.a.apply(xi))));
  }
  return 0;
}

double FinslerEvaluator::dual_eval(Vec x) const {
  switch (spec_.kind) {
    case NormKind::Euclidean:
      return spec_.dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    case NormKind::PNorm: {
      if (spec_.dim == 1) return std::abs(x[0]);
      const double p = dual_exponent_;
      const double ax = std::abs(x[0]), ay = std::abs(x[1]);
      const double m = std::max(ax, ay);
      if (m == 0) return 0;
      return m * std::pow(std::pow(ax / m, p) + std::pow(ay / m, p), 1.0 / p);
    }
    case NormKind::Anisotropic:
      return std::sqrt(std::max(0.0, dot(x, a_inv_.apply(x))));
  }
  return 0;
}

Vec FinslerEvaluator::grad(Vec xi) const {
  const double h = eval(xi);
  if (h == 0) throw ZeroVector("grad H undefined at the origin");
  switch (spec_.kind) {
    case NormKind::Euclidean:
      return (1.0 / h) * xi;
    case NormKind::PNorm: {
      if (spec_.dim == 1) return {xi[0] > 0 ? 1.0 : -1.0, 0};
      const double p = spec_.exponent;
      // dH/dxi_j = |xi_j|^{p-1} sgn(xi_j) / H^{p-1}
      const double hp = std::pow(h, p - 1.0);
      return {signed_pow(xi[0], p - 1.0) / hp, signed_pow(xi[1], p - 1.0) / hp};
    }
    case NormKind::Anisotropic:
      return (1.0 / h) * spec_.a.apply(xi);
  }
  return {0, 0};
}

Vec FinslerEvaluator::flux(Vec xi) const {
  const double h = eval(xi);
  if (h == 0) return {0, 0};
  switch (spec_.kind) {
    case NormKind::Euclidean:
      return xi;
    case NormKind::PNorm: {
      if (spec_.dim == 1) return xi;
      // a_j = H^{2-p} |xi_j|^{p-1} sgn(xi_j): finite for all p > 1, also on axes
      const double p = spec_.exponent;
      const double s = std::pow(h, 2.0 - p);
      return {s * signed_pow(xi[0], p - 1.0), s * signed_pow(xi[1], p - 1.0)};
    }
    case NormKind::Anisotropic:
      return spec_.a.apply(xi);
  }
  return {0, 0};
}

SymMat FinslerEvaluator::flux_jacobian(Vec xi) const {
  switch (spec_.kind) {
    case NormKind::Euclidean:
      return spec_.dim == 1 ? SymMat{1, 0, 0} : SymMat{1, 0, 1};
    case NormKind::Anisotropic:
      return spec_.a;
    case NormKind::PNorm: {
      if (spec_.dim == 1) return {1, 0, 0};
      const double p = spec_.exponent;
      const double h = eval(xi);
      if (h == 0) return {1, 0, 1};  // PSD surrogate at the kink
      // D a = (2-p) H^{2-2p} phi phi^T + (p-1) H^{2-p} diag(|xi_j|^{p-2}),
      // phi_j = |xi_j|^{p-1} sgn(xi_j). For p < 2 clamp the axis singularity.
      const double floor = 1e-12 * h;
      const double x0 = std::max(std::abs(xi[0]), floor);
      const double x1 = std::max(std::abs(xi[1]), floor);
      const double phi0 = signed_pow(xi[0], p - 1.0), phi1 = signed_pow(xi[1], p - 1.0);
      const double c1 = (2.0 - p) * std::pow(h, 2.0 - 2.0 * p);
      const double c2 = (p - 1.0) * std::pow(h, 2.0 - p);
      SymMat m;
      m.m00 = c1 * phi0 * phi0 + c2 * std::pow(x0, p - 2.0);
      m.m01 = c1 * phi0 * phi1;
      m.m11 = c1 * phi1 * phi1 + c2 * std::pow(x1, p - 2.0);
      if (p < 2.0) return m;
      // p > 2: the clamped diagonal may not dominate the (negative-signed)
      // rank-one part exactly; nudge toward PSD with a tiny ridge.
      const double ridge = 1e-14 * (std::abs(m.m00) + std::abs(m.m11));
      m.m00 += ridge;
      m.m11 += ridge;
      return m;
    }
  }
  return {1, 0, 1};
}

bool FinslerEvaluator::in_ball(Vec x, double radius) const {
  if (!(radius > 0)) throw NonpositiveRadius("ball radius must be positive");
  return dual_eval(x) < radius;
}

double FinslerEvaluator::ball_volume(double radius) const {
  if (!(radius > 0)) throw NonpositiveRadius("ball radius must be positive");
  return unit_dual_volume_ * (spec_.dim == 1 ? radius : radius * radius);
}

double FinslerEvaluator::dual_ball_extent(int axis) const {
  switch (spec_.kind) {
    case NormKind::Euclidean:
      return 1.0;
    case NormKind::PNorm:
      return spec_.dim == 1 ? 1.0 : 1.0;
    case NormKind::Anisotropic:
      // max of e.x over {x . A^{-1} x <= 1} is sqrt(e . A e)
      if (spec_.dim == 1) return std::sqrt(spec_.a.m00);
      return std::sqrt(axis == 0 ? spec_.a.m00 : spec_.a.m11);
  }
  return 1.0;
}

double FinslerEvaluator::dual_eval_bruteforce(Vec x, int scan_points) const {
  if (spec_.dim == 1) {
    const double h = eval({1, 0});
    return std::abs(x[0]) / h;
  }
  // Coarse scan over angles followed by golden-section refinement.
  auto value = [&](double theta) {
    const Vec xi{std::cos(theta), std::sin(theta)};
    return dot(x, xi) / eval(xi);
  };
  double best = -std::numeric_limits<double>::infinity(), best_theta = 0;
  for (int i = 0; i < scan_points; ++i) {
    const double theta = 2.0 * M_PI * i / scan_points;
    const double v = value(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  double lo = best_theta - 2.0 * M_PI / scan_points;
  double hi = best_theta + 2.0 * M_PI / scan_points;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (value(c) > value(d))
      hi = d;
    else
      lo = c;
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  return value(0.5 * (lo + hi));
}

NormIdentityReport verify_identities(const FinslerEvaluator& ev, int n_samples, uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("verify_identities: n_samples must be >= 1");
  Rng rng(seed);
  NormIdentityReport rep;
  rep.samples = n_samples;
  rep.min_monotone_pairing = std::numeric_limits<double>::infinity();
  const int dim = ev.dim();

  auto draw = [&](void) -> Vec {
    // three magnitude decades exercise homogeneity-sensitive paths
    const double scale = std::pow(10.0, std::floor(rng.uniform(-1.0, 2.0)));
    Vec v{scale * rng.sym(), dim == 2 ? scale * rng.sym() : 0.0};
    return v;
  };

  for (int i = 0; i < n_samples; ++i) {
    Vec xi = draw(), eta = draw(), x = draw();
    if (ev.eval(xi) == 0) xi[0] = 0.5;

    const double h = ev.eval(xi);
    const Vec g = ev.grad(xi);
    const double euler = std::abs(dot(xi, g) - h) / h;
    if (euler > rep.max_euler_residual) {
      rep.max_euler_residual = euler;
      rep.worst_euler_arg = xi;
    }
    rep.max_dual_grad_residual = std::max(rep.max_dual_grad_residual, std::abs(ev.dual_eval(g) - 1.0));

    const Vec a = ev.flux(xi);
    rep.max_flux_dual_residual =
        std::max(rep.max_flux_dual_residual, std::abs(ev.dual_eval(a) - h) / h);

    const double pairing = std::abs(dot(x, xi));
    const double bound = ev.dual_eval(x) * h;
    const double scale = std::max(1e-300, bound);
    rep.max_duality_violation = std::max(rep.max_duality_violation, (pairing - bound) / scale);

    const Vec diff = xi - eta;
    const double denom = norm2(xi) + norm2(eta);
    if (denom > 0) {
      const double mono = dot(ev.flux(xi) - ev.flux(eta), diff) / (denom * denom);
      if (mono < rep.min_monotone_pairing) {
        rep.min_monotone_pairing = mono;
        rep.worst_mono_arg = xi;
      }
    }
  }
  return rep;
}

}  // namespace fdl
