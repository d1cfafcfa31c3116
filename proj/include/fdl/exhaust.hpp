#pragma once

#include <memory>
#include <optional>

#include "fdl/exact.hpp"
#include "fdl/stepper.hpp"

namespace fdl {

// Initial data v(.,0) = mu as a density. DiracBump is a mass-normalized
// cosine-squared bump; Density grows like A (1 + H_0(x))^gamma; CriticalGrowth
// fixes gamma = 2/d, the borderline admissible growth of the porous-medium
// regime; Zkb seeds the self-similar solution at time t0.
struct InitialDatum {
  enum class Kind { Zero, DiracBump, Density, CriticalGrowth, Custom, Zkb };
  Kind kind = Kind::Zero;
  double mass = 1;
  double width = 0.25;
  Vec center{0, 0};
  double growth_exponent = 0;
  double amplitude = 1;
  std::shared_ptr<const Field> custom;
  double zkb_c = 1.0 / 12.0;
  double zkb_t0 = 1.0;

  static InitialDatum zero();
  static InitialDatum dirac_bump(double mass, double width, Vec center = {0, 0});
  static InitialDatum density(double growth_exponent, double amplitude);
  static InitialDatum critical_growth(double amplitude, double q);
  static InitialDatum zkb(double c_free, double t0);

  InitialDatum negated() const;
};

// Raw nodal sample of the datum (no smoothing, no cutoff).
Field sample_datum(const InitialDatum& datum, const Grid& g, const FinslerEvaluator& ev, double q);

// Separable discrete Gaussian smoothing of width delta, truncated at
// 4 delta, with zero extension outside the box. delta below h/2 is a no-op.
Field gaussian_smooth(const Field& f, double delta);

// Compactly supported smooth approximation: gaussian_smooth followed by a
// cosine-squared cutoff that is exactly 1 on the half ball and 0 outside the
// grid ball.
Field mollify(const InitialDatum& datum, const FinslerEvaluator& ev, const Grid& g, double delta,
              double q);

struct ExhaustionPlan {
  double r0 = 2;
  int levels = 3;
  double radius_factor = 2;
  double h = 1.0 / 16;
  double delta = 0;  // mollifier width; 0 = 2h
  double r_obs = 1;
  double t1 = 0.1, t2 = 0.5;  // observation window in time
  double padding = 0;         // box padding beyond the ball; 0 = 2h
  double tol_window = 1e-8;   // declare Converged when the last gap is below

  double radius(int level) const;
  void validate() const;  // throws ValidationError
};

struct ConvergenceReport {
  std::vector<double> radii;
  std::vector<double> window_errors;  // e_n = |u_n - u_{n+1}|_{L1(window)}
  bool converged = false;
  int blowup_level = -1;  // >= 0 when some level ended in BlowUpSuspected
};

struct ExhaustionResult {
  std::vector<std::unique_ptr<Grid>> grids;
  std::vector<RunResult> runs;
  ConvergenceReport report;
};

ExhaustionResult run_exhaustion(const ExhaustionPlan& plan, const InitialDatum& datum, double q,
                                const FinslerEvaluator& ev, const StepConfig& cfg);

// L1 distance of two runs' u over a shared window: the grids must share the
// lattice (equal h, aligned nodes) and the save schedule.
double window_error(const RunResult& a, const RunResult& b, const FinslerEvaluator& ev,
                    double r_obs, double t1, double t2);

// (A1): per level, int_{t1}^{t2} (int_{B_R} |u|)^delta dt
//       + int int_{B_R} (|v|^2 + H(grad u)^2); PASS when max/min <= 2.
struct A1Report {
  double delta_exponent = 3;
  double radius = 1, t1 = 0, t2 = 0;
  std::vector<double> values;
  double ratio = 0;
  bool pass = false;
};
A1Report verify_A1(const ExhaustionResult& ex, const FinslerEvaluator& ev, double radius,
                   double t1, double t2, double delta_exponent);

// (A2): g(t) = sup_n int_0^t int_{B_R} (|v_n| + H(grad u_n)); PASS when the
// log-log slope of g is at least 0.4 and g vanishes monotonically at 0.
struct A2Report {
  double radius = 1;
  std::vector<double> t;
  std::vector<double> g;
  double slope = 0;
  bool pass = false;
};
A2Report verify_A2(const ExhaustionResult& ex, const FinslerEvaluator& ev, double radius,
                   const std::vector<double>& t_grid);

}  // namespace fdl
