#include "fdl/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/errors.hpp"
#include "fdl/linsolve.hpp"

namespace fdl {

namespace {

// Per-face stencil entry: node and its weight vector d(face gradient)/d(u_node).
struct StencilEntry {
  int node;
  Vec w;
};

int face_stencil(const Grid& g, const Grid::Face& f, StencilEntry out[6]) {
  const double inv_h = 1.0 / g.h;
  int n = 0;
  const Vec en = f.axis == 0 ? Vec{1, 0} : Vec{0, 1};
  const Vec et = f.axis == 0 ? Vec{0, 1} : Vec{1, 0};
  out[n++] = {f.a, -inv_h * en};
  out[n++] = {f.b, inv_h * en};
  if (g.dim == 2) {
    const double c = 0.25 * inv_h;
    if (f.t[0] >= 0) out[n++] = {f.t[0], -c * et};
    if (f.t[1] >= 0) out[n++] = {f.t[1], c * et};
    if (f.t[2] >= 0) out[n++] = {f.t[2], -c * et};
    if (f.t[3] >= 0) out[n++] = {f.t[3], c * et};
  }
  return n;
}

// Cached sparsity and scratch arrays for the Newton systems on one grid.
struct NewtonWorkspace {
  const Grid* grid = nullptr;
  CsrMatrix jac;
  std::vector<int> entry_of;  // per (face, i, j) CSR slot, laid out face-major
  bool tridiagonal = false;
  std::vector<double> lower, diag, upper;

  explicit NewtonWorkspace(const Grid& g) : grid(&g) {
    tridiagonal = g.dim == 1;
    if (tridiagonal) {
      lower.resize(g.n_interior);
      diag.resize(g.n_interior);
      upper.resize(g.n_interior);
      return;
    }
    // adjacency from face stencils
    std::vector<std::vector<int>> adj(g.n_interior);
    StencilEntry st[6];
    for (const auto& f : g.faces) {
      const int ns = face_stencil(g, f, st);
      for (int i = 0; i < ns; ++i) {
        const int di = g.dof_of_node[st[i].node];
        if (di < 0) continue;
        for (int j = 0; j < ns; ++j) {
          const int dj = g.dof_of_node[st[j].node];
          if (dj >= 0) adj[di].push_back(dj);
        }
      }
    }
    jac.n = g.n_interior;
    jac.row_ptr.assign(g.n_interior + 1, 0);
    for (int r = 0; r < g.n_interior; ++r) {
      auto& a = adj[r];
      a.push_back(r);
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
      jac.row_ptr[r + 1] = jac.row_ptr[r] + static_cast<int>(a.size());
    }
    jac.col.resize(jac.row_ptr.back());
    for (int r = 0; r < g.n_interior; ++r)
      std::copy(adj[r].begin(), adj[r].end(), jac.col.begin() + jac.row_ptr[r]);
    jac.val.assign(jac.col.size(), 0.0);

    entry_of.reserve(g.faces.size() * 36);
    for (const auto& f : g.faces) {
      const int ns = face_stencil(g, f, st);
      for (int i = 0; i < ns; ++i) {
        const int di = g.dof_of_node[st[i].node];
        for (int j = 0; j < ns; ++j) {
          const int dj = g.dof_of_node[st[j].node];
          if (di < 0 || dj < 0) {
            entry_of.push_back(-1);
            continue;
          }
          const auto lo = jac.col.begin() + jac.row_ptr[di];
          const auto hi = jac.col.begin() + jac.row_ptr[di + 1];
          entry_of.push_back(static_cast<int>(std::lower_bound(lo, hi, dj) - jac.col.begin()));
        }
      }
    }
  }
};

double beta_prime_reg(double q, double u, double eps) {
  return (q - 1.0) * std::pow(std::abs(u) + eps, q - 2.0);
}

double beta_inv_prime_reg(double q, double v, double eps) {
  return std::pow(std::abs(v) + eps, (2.0 - q) / (q - 1.0)) / (q - 1.0);
}

// Newton state: u and v = beta(u) kept consistent. The Newton unknown is the
// variable whose companion map is C^1 at zero: u for q >= 2 (beta' bounded on
// bounded sets), v for q < 2 (beta^{-1} smooth, slope (1/(q-1))|v|^d -> 0).
// Iterating in u for q < 2 stalls at the free boundary, where beta has
// unbounded slope and Newton iterates straddle zero. The converged state
// satisfies the unregularized equation v - dt L(u) = v_prev either way.
struct PrimalState {
  Field u, v;
};

void sync_from_u(const Grid& g, double q, PrimalState& s) {
  for (int d = 0; d < g.n_interior; ++d) {
    const int n = g.node_of_dof[d];
    s.v.values[n] = beta_pow(q, s.u.values[n]);
  }
}

void sync_from_v(const Grid& g, double q, PrimalState& s) {
  for (int d = 0; d < g.n_interior; ++d) {
    const int n = g.node_of_dof[d];
    s.u.values[n] = beta_inverse(q, s.v.values[n]);
  }
}

// Residual of the step equation at interior dofs; returns its sup-norm.
double residual(const Grid& g, const FinslerEvaluator& ev, const PrimalState& s,
                const Field& v_prev, double dt, std::vector<double>& r) {
  const Field lap = finsler_laplacian(g, ev, s.u);
  r.resize(g.n_interior);
  double sup = 0;
  for (int d = 0; d < g.n_interior; ++d) {
    const int n = g.node_of_dof[d];
    r[d] = s.v.values[n] - dt * lap.values[n] - v_prev.values[n];
    sup = std::max(sup, std::abs(r[d]));
  }
  return sup;
}

// Flux-term stiffness K(u) (the Hessian of the discrete energy scaled by the
// cell volume), assembled without any time or beta factors.
void assemble_stiffness_tridiag(const Grid& g, const FinslerEvaluator& ev, const Field& u,
                                NewtonWorkspace& ws) {
  std::fill(ws.lower.begin(), ws.lower.end(), 0.0);
  std::fill(ws.diag.begin(), ws.diag.end(), 0.0);
  std::fill(ws.upper.begin(), ws.upper.end(), 0.0);
  const double c = (g.face_weight() / g.cell_volume()) / (g.h * g.h);
  for (const auto& f : g.faces) {
    const double da = c * ev.flux_jacobian(face_gradient(g, u, f)).m00;
    const int ia = g.dof_of_node[f.a], ib = g.dof_of_node[f.b];
    if (ia >= 0) ws.diag[ia] += da;
    if (ib >= 0) ws.diag[ib] += da;
    if (ia >= 0 && ib >= 0) {
      // consecutive dofs in 1D
      ws.upper[std::min(ia, ib)] -= da;
      ws.lower[std::max(ia, ib)] -= da;
    }
  }
}

void assemble_stiffness_csr(const Grid& g, const FinslerEvaluator& ev, const Field& u,
                            NewtonWorkspace& ws) {
  std::fill(ws.jac.val.begin(), ws.jac.val.end(), 0.0);
  StencilEntry st[6];
  size_t cursor = 0;
  const double c = g.face_weight() / g.cell_volume();
  for (const auto& f : g.faces) {
    const SymMat da = ev.flux_jacobian(face_gradient(g, u, f));
    const int ns = face_stencil(g, f, st);
    for (int i = 0; i < ns; ++i) {
      const Vec dwi = da.apply(st[i].w);
      for (int j = 0; j < ns; ++j) {
        const int slot = ws.entry_of[cursor++];
        if (slot >= 0) ws.jac.val[slot] += c * dot(st[j].w, dwi);
      }
    }
  }
}

struct StepStats {
  int newton_iterations = 0;
  double residual = 0;
};

// Damped Newton for beta(u) - dt L(u) = v_prev; see PrimalState for the
// choice of unknown. max 30 halvings in the backtracking line search.
StepStats step_solve(const Grid& g, const FinslerEvaluator& ev, double q, const Field& v_prev,
                     double dt, const StepConfig& cfg, NewtonWorkspace& ws, PrimalState& s) {
  const bool u_primal = q >= 2.0;
  std::vector<double> r, delta, trial_r, dvec, rhs;
  double res = residual(g, ev, s, v_prev, dt, r);
  StepStats stats;
  PrimalState trial{make_field(g), make_field(g)};
  for (int it = 0; it < cfg.max_newton; ++it) {
    if (res <= cfg.newton_tol) {
      stats.residual = res;
      return stats;
    }
    double sup_primal = 0;
    for (int d = 0; d < g.n_interior; ++d) {
      const int n = g.node_of_dof[d];
      sup_primal = std::max(sup_primal, std::abs(u_primal ? s.u.values[n] : s.v.values[n]));
    }
    const double eps = cfg.jacobian_eps * (1.0 + sup_primal);
    dvec.resize(g.n_interior);
    for (int d = 0; d < g.n_interior; ++d) {
      const int n = g.node_of_dof[d];
      dvec[d] = u_primal ? beta_prime_reg(q, s.u.values[n], eps)
                         : beta_inv_prime_reg(q, s.v.values[n], eps);
    }
    rhs.assign(r.begin(), r.end());
    for (auto& x : rhs) x = -x;

    if (ws.tridiagonal) {
      assemble_stiffness_tridiag(g, ev, s.u, ws);
      if (u_primal) {
        // (diag(beta') + dt K) du = -r, symmetric positive definite
        for (int d = 0; d < g.n_interior; ++d)
          ws.diag[d] = dvec[d] + dt * ws.diag[d];
        for (int d = 0; d < g.n_interior; ++d) {
          ws.lower[d] *= dt;
          ws.upper[d] *= dt;
        }
      } else {
        // (I + dt K D) dv = -r; column-diagonally dominant tridiagonal
        for (int d = 0; d < g.n_interior; ++d) ws.diag[d] = 1.0 + dt * ws.diag[d] * dvec[d];
        for (int d = 1; d < g.n_interior; ++d) ws.lower[d] *= dt * dvec[d - 1];
        for (int d = 0; d + 1 < g.n_interior; ++d) ws.upper[d] *= dt * dvec[d + 1];
      }
      solve_tridiagonal(ws.lower, ws.diag, ws.upper, rhs, delta);
    } else {
      assemble_stiffness_csr(g, ev, s.u, ws);
      auto& m = ws.jac;
      if (u_primal) {
        for (int row = 0; row < m.n; ++row)
          for (int k = m.row_ptr[row]; k < m.row_ptr[row + 1]; ++k)
            m.val[k] = dt * m.val[k] + (m.col[k] == row ? dvec[row] : 0.0);
      } else {
        // symmetrized form S = I + dt D^{1/2} K D^{1/2}; solve S y = -D^{1/2} r
        // and map back dv = D^{-1/2} y
        for (int row = 0; row < m.n; ++row) {
          const double sr = std::sqrt(dvec[row]);
          for (int k = m.row_ptr[row]; k < m.row_ptr[row + 1]; ++k)
            m.val[k] = dt * sr * std::sqrt(dvec[m.col[k]]) * m.val[k] +
                       (m.col[k] == row ? 1.0 : 0.0);
        }
        for (int d = 0; d < g.n_interior; ++d) rhs[d] *= std::sqrt(dvec[d]);
      }
      const double atol = 0.02 * cfg.newton_tol;
      const auto cg = solve_cg(m, rhs, delta, 1e-6, atol, 20000);
      if (!cg.converged && cg.residual > 10 * atol && cg.residual > 1e-3 * res)
        throw NonConvergence(it, res);
      if (!u_primal)
        for (int d = 0; d < g.n_interior; ++d) delta[d] /= std::sqrt(dvec[d]);
    }

    // backtracking on the residual sup-norm
    double lambda = 1.0;
    bool accepted = false;
    for (int damp = 0; damp <= cfg.max_damping; ++damp) {
      trial.u.values = s.u.values;
      trial.v.values = s.v.values;
      for (int d = 0; d < g.n_interior; ++d) {
        const int n = g.node_of_dof[d];
        (u_primal ? trial.u : trial.v).values[n] += lambda * delta[d];
      }
      if (u_primal)
        sync_from_u(g, q, trial);
      else
        sync_from_v(g, q, trial);
      const double trial_res = residual(g, ev, trial, v_prev, dt, trial_r);
      if (trial_res < res) {
        s.u.values.swap(trial.u.values);
        s.v.values.swap(trial.v.values);
        r.swap(trial_r);
        res = trial_res;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    stats.newton_iterations = it + 1;
    if (!accepted) throw NonConvergence(it + 1, res);
  }
  if (res <= cfg.newton_tol) {
    stats.residual = res;
    return stats;
  }
  throw NonConvergence(cfg.max_newton, res);
}

struct WindowIndex {
  double radius;
  std::vector<int> nodes;  // interior node ids inside the ball
  std::vector<int> faces;  // face ids with center inside the ball
};

std::vector<WindowIndex> build_windows(const Grid& g, const FinslerEvaluator& ev,
                                       const std::vector<double>& radii) {
  std::vector<WindowIndex> out;
  for (double rad : radii) {
    WindowIndex w;
    w.radius = rad;
    for (int d = 0; d < g.n_interior; ++d) {
      const int n = g.node_of_dof[d];
      const int i = n % g.nx, j = n / g.nx;
      const Vec x{g.coord[i], g.dim == 2 ? g.coord[j] : 0.0};
      if (ev.in_ball(x, rad)) w.nodes.push_back(n);
    }
    for (size_t k = 0; k < g.faces.size(); ++k) {
      const Vec c{g.faces[k].cx, g.faces[k].cy};
      if (ev.in_ball(c, rad)) w.faces.push_back(static_cast<int>(k));
    }
    out.push_back(std::move(w));
  }
  return out;
}

void record_monitors(const Grid& g, const FinslerEvaluator& ev, const Field& u,
                     const Field& v, double t, const std::vector<WindowIndex>& windows,
                     MonitorSeries& mon) {
  mon.t.push_back(t);
  std::vector<double> terms(g.n_interior);
  for (int d = 0; d < g.n_interior; ++d) terms[d] = v.values[g.node_of_dof[d]];
  mon.mass.push_back(pairwise_sum(terms) * g.cell_volume());
  double sup = 0;
  for (int d = 0; d < g.n_interior; ++d)
    sup = std::max(sup, std::abs(u.values[g.node_of_dof[d]]));
  mon.sup_u.push_back(sup);
  std::vector<double> gterms(g.faces.size());
  for (size_t k = 0; k < g.faces.size(); ++k)
    gterms[k] = ev.eval(face_gradient(g, u, g.faces[k]));
  mon.grad_l1.push_back(pairwise_sum(gterms) * g.face_weight());
  mon.energy.push_back(discrete_energy(g, ev, u));
  for (size_t wi = 0; wi < windows.size(); ++wi) {
    const auto& w = windows[wi];
    auto& series = mon.windowed[wi];
    std::vector<double> vt(w.nodes.size());
    double wsup = 0;
    for (size_t k = 0; k < w.nodes.size(); ++k) {
      vt[k] = std::abs(v.values[w.nodes[k]]);
      wsup = std::max(wsup, std::abs(u.values[w.nodes[k]]));
    }
    series.v_l1.push_back(pairwise_sum(vt) * g.cell_volume());
    series.sup_u.push_back(wsup);
    std::vector<double> gt(w.faces.size());
    for (size_t k = 0; k < w.faces.size(); ++k) gt[k] = gterms[w.faces[k]];
    series.grad_l1.push_back(pairwise_sum(gt) * g.face_weight());
  }
}

}  // namespace

const MonitorSeries::Windowed& MonitorSeries::at_radius(double r) const {
  for (const auto& w : windowed)
    if (std::abs(w.radius - r) <= 1e-12 * std::max(1.0, r)) return w;
  throw std::invalid_argument("no windowed monitor at the requested radius");
}

Field implicit_step(const Grid& g, const FinslerEvaluator& ev, double q, const Field& v_prev,
                    double dt, const StepConfig& cfg) {
  require_conforming(g, v_prev);
  NewtonWorkspace ws(g);
  PrimalState s{make_field(g), make_field(g)};
  s.v.values = v_prev.values;
  enforce_mask(s.v);
  sync_from_v(g, q, s);
  step_solve(g, ev, q, v_prev, dt, cfg, ws, s);
  return s.v;
}

RunResult run(const Grid& g, const FinslerEvaluator& ev, double q, const Field& v_init,
              const StepConfig& cfg) {
  require_conforming(g, v_init);
  RunResult res;
  res.grid = &g;
  res.q = q;
  res.monitors.windowed.resize(cfg.monitor_radii.size());
  for (size_t i = 0; i < cfg.monitor_radii.size(); ++i)
    res.monitors.windowed[i].radius = cfg.monitor_radii[i];
  const auto windows = build_windows(g, ev, cfg.monitor_radii);

  NewtonWorkspace ws(g);
  PrimalState s{make_field(g), make_field(g)};
  s.v.values = v_init.values;
  enforce_mask(s.v);
  sync_from_v(g, q, s);

  double sup0 = 0;
  for (int d = 0; d < g.n_interior; ++d)
    sup0 = std::max(sup0, std::abs(s.u.values[g.node_of_dof[d]]));

  // relative blow-up watch over an inner window (growing data keeps the
  // global sup pinned by the maximum principle, so watch where the datum is
  // small and the blow-up inflow shows up)
  std::vector<int> cap_nodes;
  double cap_threshold = std::numeric_limits<double>::infinity();
  if (cfg.sup_cap_rel > 0) {
    const double rad = cfg.cap_radius > 0 ? cfg.cap_radius : g.ball_radius;
    for (int d = 0; d < g.n_interior; ++d) {
      const int n = g.node_of_dof[d];
      const int i = n % g.nx, j = n / g.nx;
      if (ev.in_ball({g.coord[i], g.dim == 2 ? g.coord[j] : 0.0}, rad)) cap_nodes.push_back(n);
    }
    double w0 = 0;
    for (int n : cap_nodes) w0 = std::max(w0, std::abs(s.u.values[n]));
    if (w0 > 0) cap_threshold = cfg.sup_cap_rel * w0;
  }
  auto window_sup = [&] {
    double w = 0;
    for (int n : cap_nodes) w = std::max(w, std::abs(s.u.values[n]));
    return w;
  };

  auto save = [&](double t) {
    res.saved_times.push_back(t);
    res.u_saved.push_back(s.u);
    res.v_saved.push_back(s.v);
  };
  record_monitors(g, ev, s.u, s.v, 0.0, windows, res.monitors);
  save(0.0);

  const double dt_min = cfg.dt_min_rel * cfg.t_end;
  double t = 0, dt = cfg.dt0;
  double next_save = cfg.save_every > 0 ? cfg.save_every : cfg.t_end;
  const double t_eps = 1e-12 * cfg.t_end;

  while (t < cfg.t_end - t_eps) {
    double step_dt = std::min({dt, next_save - t, cfg.t_end - t});
    if (step_dt <= 0) step_dt = cfg.t_end - t;
    PrimalState trial{s.u, s.v};
    bool ok = false;
    std::string fail_detail;
    while (true) {
      try {
        step_solve(g, ev, q, s.v, step_dt, cfg, ws, trial);
        ok = true;
        break;
      } catch (const NonConvergence& e) {
        fail_detail = e.what();
        step_dt *= 0.5;
        if (step_dt < dt_min) break;
        trial.u.values = s.u.values;  // restart from the accepted state
        trial.v.values = s.v.values;
      }
    }
    if (!ok) {
      double sup = 0;
      for (int d = 0; d < g.n_interior; ++d)
        sup = std::max(sup, std::abs(s.u.values[g.node_of_dof[d]]));
      res.status.kind = sup > 1e3 * std::max(sup0, 1e-300) ? RunStatusKind::BlowUpSuspected
                                                           : RunStatusKind::SolverFailed;
      res.status.time = t;
      res.status.detail = fail_detail;
      if (res.saved_times.empty() || res.saved_times.back() < t - t_eps) save(t);
      return res;
    }
    s.u.values.swap(trial.u.values);
    s.v.values.swap(trial.v.values);
    t += step_dt;
    record_monitors(g, ev, s.u, s.v, t, windows, res.monitors);
    if (t >= next_save - t_eps && cfg.save_every > 0) {
      save(t);
      next_save += cfg.save_every;
    }
    if (res.monitors.sup_u.back() > cfg.sup_cap ||
        (!cap_nodes.empty() && window_sup() > cap_threshold)) {
      res.status.kind = RunStatusKind::BlowUpSuspected;
      res.status.time = t;
      res.status.detail = "sup exceeded cap";
      if (res.saved_times.back() < t - t_eps) save(t);
      return res;
    }
    dt = std::max(step_dt, dt);  // undo save-boundary clipping
    dt *= cfg.dt_growth;
    if (cfg.dt_max > 0) dt = std::min(dt, cfg.dt_max);
  }
  if (res.saved_times.back() < t - t_eps) save(t);
  res.status.kind = RunStatusKind::Completed;
  res.status.time = t;
  return res;
}

namespace {

double bump_space(const TestBump& b, Vec x) {
  const double r = norm2(x - b.center);
  if (r >= b.radius) return 0;
  const double c = std::cos(0.5 * M_PI * r / b.radius);
  return c * c;
}

Vec bump_space_grad(const TestBump& b, Vec x) {
  const Vec dx = x - b.center;
  const double r = norm2(dx);
  if (r >= b.radius || r == 0) return {0, 0};
  const double arg = 0.5 * M_PI * r / b.radius;
  const double dcdr = -2.0 * std::cos(arg) * std::sin(arg) * 0.5 * M_PI / b.radius;
  return (dcdr / r) * dx;
}

// cubic ramp decreasing from 1 to 1/2 over [0, T]; all four weak-form terms
// stay active.
double bump_time(double s) { return 1.0 - 0.5 * s * s * (3.0 - 2.0 * s); }
double bump_time_deriv(double s, double t_total) {
  return -0.5 * (6.0 * s - 6.0 * s * s) / t_total;
}

}  // namespace

double residual_weakform(const RunResult& result, const TestBump& bump, const Grid& g,
                         const FinslerEvaluator& ev, double q) {
  (void)q;  // the saved v fields already encode beta
  if (result.grid != &g) throw ShapeMismatch("run result belongs to another grid");
  if (result.saved_times.size() < 2) throw std::invalid_argument("need at least two snapshots");
  // the bump support plus one cell must consist of interior nodes
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec x{g.coord[i], g.dim == 2 ? g.coord[j] : 0.0};
      if (norm2(x - bump.center) < bump.radius + g.h && !g.interior[g.node(i, j)])
        throw BumpTouchesBoundary("test bump must stay inside the mask");
    }

  const double t_total = result.saved_times.back();
  const size_t n_t = result.saved_times.size();
  const double cell = g.cell_volume();

  // precompute the spatial profile at nodes and its gradient at face centers
  std::vector<double> psi_node(g.n_interior);
  for (int d = 0; d < g.n_interior; ++d) {
    const int n = g.node_of_dof[d];
    const int i = n % g.nx, j = n / g.nx;
    psi_node[d] = bump_space(bump, {g.coord[i], g.dim == 2 ? g.coord[j] : 0.0});
  }
  std::vector<Vec> psi_grad(g.faces.size());
  for (size_t k = 0; k < g.faces.size(); ++k)
    psi_grad[k] = bump_space_grad(bump, {g.faces[k].cx, g.faces[k].cy});

  auto pair_v = [&](const Field& v, double ramp) {
    std::vector<double> terms(g.n_interior);
    for (int d = 0; d < g.n_interior; ++d)
      terms[d] = v.values[g.node_of_dof[d]] * psi_node[d] * ramp;
    return pairwise_sum(terms) * cell;
  };
  auto pair_flux = [&](const Field& u, double ramp) {
    std::vector<double> terms(g.faces.size());
    for (size_t k = 0; k < g.faces.size(); ++k)
      terms[k] = dot(ev.flux(face_gradient(g, u, g.faces[k])), psi_grad[k]) * ramp;
    return pairwise_sum(terms) * g.face_weight();
  };

  // time integrals by trapezoid over the snapshots
  double term_dt = 0, term_flux = 0;
  std::vector<double> vd(n_t), fl(n_t);
  for (size_t k = 0; k < n_t; ++k) {
    const double s = result.saved_times[k] / t_total;
    vd[k] = pair_v(result.v_saved[k], bump_time_deriv(s, t_total));
    fl[k] = pair_flux(result.u_saved[k], bump_time(s));
  }
  for (size_t k = 1; k < n_t; ++k) {
    const double dtk = result.saved_times[k] - result.saved_times[k - 1];
    term_dt += 0.5 * (vd[k] + vd[k - 1]) * dtk;
    term_flux += 0.5 * (fl[k] + fl[k - 1]) * dtk;
  }
  const double term_final = pair_v(result.v_saved.back(), bump_time(1.0));
  const double term_initial = pair_v(result.v_saved.front(), bump_time(0.0));
  return -term_dt + term_final - term_initial + term_flux;
}

bool max_principle_check(const RunResult& result, double bound) {
  const double q = result.q;
  for (double s : result.monitors.sup_u) {
    const double vsup = std::pow(s, q - 1.0);
    if (vsup > bound * (1.0 + 1e-8)) return false;
  }
  return true;
}

}  // namespace fdl
