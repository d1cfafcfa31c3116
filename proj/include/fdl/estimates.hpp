#pragma once

#include <string>

#include "fdl/exhaust.hpp"

namespace fdl {

// Weighted growth norm sup_{R >= r} R^{-kappa_1/d} int_{B_R} |f|, sampled on
// geometrically spaced radii (factor sqrt 2) up to the domain radius.
struct GrowthNormSample {
  double base_radius = 1;
  std::vector<double> radii;
  std::vector<double> values;
  double supremum = 0;
  double tail_value = 0;  // value at the largest sampled radius
};

GrowthNormSample growth_norm(const Field& f, const FinslerEvaluator& ev, double r, double q,
                             int dim);
// For analytic radial densities rho -> |f|(rho): integrates against the dual
// ball volume element out to r_max.
GrowthNormSample growth_norm_radial(const std::function<double(double)>& radial_abs_density,
                                    const FinslerEvaluator& ev, double r, double q, int dim,
                                    double r_max);

// T_r(mu) = c |||mu|||_r^{-d}; the global variant returns +inf when the tail
// of the growth norm vanishes.
double existence_time(const GrowthNormSample& s, double c, double q);
double existence_time_global(const GrowthNormSample& s, double c, double q);

struct CheckLine {
  std::string name;
  bool pass = false;
  double value = 0;
  double expected = 0;
  double tol = 0;
};

struct EstimateReport {
  std::string title;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;
  std::vector<CheckLine> checks;
  bool all_pass() const;
};

// Fast-diffusion estimates: ratio stability of the three bounds with the
// constant fitted at the first admissible time, plus the smoothing-exponent
// slope of |u|_inf against -N/(kappa_1 (q-1)).
// Requires windowed monitors at radii R and 2R and an initial mass proxy.
EstimateReport fde_report(const RunResult& result, const FinslerEvaluator& ev, double q, int dim,
                          double radius, double t_lo, double t_hi);

// Porous-medium estimates over the growth norms, with the phi_r / psi_r
// monitor series and their monotonicity checks.
EstimateReport pme_report(const RunResult& result, const FinslerEvaluator& ev, double q, int dim,
                          double r, double radius, double t_lo, double t_hi);

struct SupportRadiusSeries {
  std::vector<double> t;
  std::vector<double> radius;
  double fitted_slope = 0;
};
SupportRadiusSeries support_radius(const RunResult& result, const FinslerEvaluator& ev,
                                   double threshold);

// Runs the critical-growth template at each amplitude on a ball of the given
// radius and fits log t* against log A; PASS when the slope is -d within 15%.
// Censored runs (no blow-up before t_end) are excluded; all-censored throws.
struct BlowupScanConfig {
  double ball_radius = 8;
  double h = 1.0 / 16;
  double sup_cap_rel = 25;   // relative blow-up threshold on the watch window
  double cap_radius = 0.5;   // watch window radius
};
EstimateReport blowup_scan(const std::vector<double>& amplitudes, const InitialDatum& datum_template,
                           double q, int dim, const FinslerEvaluator& ev,
                           const BlowupScanConfig& scan, const StepConfig& cfg);

// phi_r / psi_r integral-inequality bookkeeping: discrete series from the
// saved fields, the minimal forcing constants given the offset constants, and
// an ode_compare cross-check against the closed-form majorant.
struct MajorantConsistency {
  double d = 0, kappa = 0;
  double growth_norm_mu = 0;
  std::vector<double> t, phi, psi;
  double c1_min = 0;  // given c2, smallest C1 validating the phi inequality
  double c5_min = 0;  // given c3, smallest C5 validating the reduced psi inequality
  bool majorant_dominates = false;
};
// sample_every > 0 restricts the series to snapshots at multiples of that
// interval, so runs with different save cadences can be compared like for
// like under mesh refinement.
MajorantConsistency majorant_consistency(const RunResult& result, const FinslerEvaluator& ev,
                                         double q, int dim, double r, double c2, double c3,
                                         double sample_every = 0);

}  // namespace fdl
