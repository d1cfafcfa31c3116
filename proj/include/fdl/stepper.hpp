#pragma once

#include <string>
#include <vector>

#include "fdl/disc.hpp"

namespace fdl {

struct StepConfig {
  double dt0 = 1e-3;
  double t_end = 1.0;
  double newton_tol = 1e-10;  // residual sup-norm on the v-equation
  int max_newton = 60;
  double jacobian_eps = 1e-8;  // beta' regularized as (q-1)(|u| + eps(1+|u|_inf))^{q-2}
  int max_damping = 30;        // line-search halvings
  double dt_min_rel = 1e-10;   // dt_min = dt_min_rel * t_end
  double sup_cap = 1e8;        // absolute blow-up threshold on |u|_inf
  // Relative detector for growing data, where the maximum principle pins the
  // global sup: watches |u|_inf over the ball B_cap_radius and flags blow-up
  // once it exceeds sup_cap_rel times its initial value. cap_radius = 0
  // watches the whole mask.
  double sup_cap_rel = 0;
  double cap_radius = 0;
  double dt_growth = 1.15;     // step growth after an accepted step
  double dt_max = 0;           // 0 = no cap
  double save_every = 0;       // field snapshot interval; 0 = endpoints only
  std::vector<double> monitor_radii;  // windowed monitor radii (dual-norm balls)
};

enum class RunStatusKind { Completed, BlowUpSuspected, SolverFailed };

struct RunStatus {
  RunStatusKind kind = RunStatusKind::Completed;
  double time = 0;  // blow-up / failure time (last accepted step)
  std::string detail;
};

// Per-step scalar monitors plus optional windowed series over dual balls.
struct MonitorSeries {
  std::vector<double> t;
  std::vector<double> mass;     // sum v * cell volume
  std::vector<double> sup_u;    // |u|_inf
  std::vector<double> grad_l1;  // sum H(grad u) * face weight
  std::vector<double> energy;   // discrete energy
  struct Windowed {
    double radius = 0;
    std::vector<double> v_l1;
    std::vector<double> grad_l1;
    std::vector<double> sup_u;
  };
  std::vector<Windowed> windowed;

  const Windowed& at_radius(double r) const;  // throws if not monitored
};

struct RunResult {
  const Grid* grid = nullptr;
  double q = 2;
  std::vector<double> saved_times;
  std::vector<Field> u_saved;
  std::vector<Field> v_saved;
  MonitorSeries monitors;
  RunStatus status;
};

// One backward-Euler step of beta(u)_t = Delta_H u: solves
//   beta(u_next) - dt * L(u_next) = v_prev
// nodewise by damped Newton and returns v_next = beta(u_next). The Newton
// unknown is u for q >= 2 and v for q < 2 (the variable whose companion map
// is C^1 at zero); only the Jacobian is regularized, never the residual.
// Throws NonConvergence when the iteration stalls at this dt.
Field implicit_step(const Grid& g, const FinslerEvaluator& ev, double q, const Field& v_prev,
                    double dt, const StepConfig& cfg);

// March to t_end with step halving on solver failure and geometric regrowth
// after accepted steps. Monitors are recorded at every accepted step; field
// snapshots at multiples of save_every (plus t = 0 and the final time).
RunResult run(const Grid& g, const FinslerEvaluator& ev, double q, const Field& v_init,
              const StepConfig& cfg);

// Smooth space-time test function for the weak-form residual: cosine-squared
// bump of given center/radius, times a cubic time ramp decreasing from 1.
struct TestBump {
  Vec center{0, 0};
  double radius = 0.5;
};

// Evaluates the four integrals of the weak formulation on the saved fields
// (trapezoid in time, midpoint in space) and returns their sum.
double residual_weakform(const RunResult& result, const TestBump& bump, const Grid& g,
                         const FinslerEvaluator& ev, double q);

// True iff sup_t |v(t)|_inf <= bound * (1 + 1e-8), from the step monitors.
bool max_principle_check(const RunResult& result, double bound);

}  // namespace fdl
