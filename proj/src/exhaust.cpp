#include "fdl/exhaust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/errors.hpp"
#include "fdl/parallel.hpp"

namespace fdl {

InitialDatum InitialDatum::zero() { return {}; }

InitialDatum InitialDatum::dirac_bump(double mass, double width, Vec center) {
  InitialDatum d;
  d.kind = Kind::DiracBump;
  d.mass = mass;
  d.width = width;
  d.center = center;
  return d;
}

InitialDatum InitialDatum::density(double growth_exponent, double amplitude) {
  if (growth_exponent < 0) throw ValidationError("datum", "growth exponent must be >= 0");
  InitialDatum d;
  d.kind = Kind::Density;
  d.growth_exponent = growth_exponent;
  d.amplitude = amplitude;
  return d;
}

InitialDatum InitialDatum::critical_growth(double amplitude, double q) {
  if (!(q > 1 && q < 2)) throw OutOfRegime("critical growth is a porous-medium datum (1 < q < 2)");
  InitialDatum d;
  d.kind = Kind::CriticalGrowth;
  d.growth_exponent = 2.0 * (q - 1.0) / (2.0 - q);  // 2/d
  d.amplitude = amplitude;
  return d;
}

InitialDatum InitialDatum::zkb(double c_free, double t0) {
  if (!(t0 > 0)) throw NonpositiveTime("ZKB seed time must be positive");
  InitialDatum d;
  d.kind = Kind::Zkb;
  d.zkb_c = c_free;
  d.zkb_t0 = t0;
  return d;
}

InitialDatum InitialDatum::negated() const {
  InitialDatum d = *this;
  d.mass = -d.mass;
  d.amplitude = -d.amplitude;
  if (custom) {
    auto neg = std::make_shared<Field>(*custom);
    for (auto& v : neg->values) v = -v;
    d.custom = neg;
  }
  return d;
}

namespace {

double dirac_bump_norm(int dim, double width) {
  // integral of cos^2(pi r / (2 w)) over the bump support
  if (dim == 1) return width;
  return 2.0 * M_PI * width * width * (0.25 - 1.0 / (M_PI * M_PI));
}

}  // namespace

Field sample_datum(const InitialDatum& datum, const Grid& g, const FinslerEvaluator& ev,
                   double q) {
  Field f = make_field(g);
  auto node_coord = [&](int n) -> Vec {
    const int i = n % g.nx, j = n / g.nx;
    return {g.coord[i], g.dim == 2 ? g.coord[j] : 0.0};
  };
  switch (datum.kind) {
    case InitialDatum::Kind::Zero:
      break;
    case InitialDatum::Kind::DiracBump: {
      const double c = datum.mass / dirac_bump_norm(g.dim, datum.width);
      for (size_t n = 0; n < f.values.size(); ++n) {
        const double r = norm2(node_coord(static_cast<int>(n)) - datum.center);
        if (r < datum.width) {
          const double arg = std::cos(0.5 * M_PI * r / datum.width);
          f.values[n] = c * arg * arg;
        }
      }
      break;
    }
    case InitialDatum::Kind::Density:
    case InitialDatum::Kind::CriticalGrowth: {
      for (size_t n = 0; n < f.values.size(); ++n) {
        const double rho = ev.dual_eval(node_coord(static_cast<int>(n)));
        f.values[n] = datum.amplitude * std::pow(1.0 + rho, datum.growth_exponent);
      }
      break;
    }
    case InitialDatum::Kind::Custom: {
      if (!datum.custom) throw ValidationError("datum", "custom datum carries no field");
      const Field& src = *datum.custom;
      if (src.grid == &g) {
        f.values = src.values;
      } else {
        // shared-lattice transfer by index offset
        const Grid& sg = *src.grid;
        if (std::abs(sg.h - g.h) > 1e-12 * g.h)
          throw ShapeMismatch("custom datum lives on an incompatible lattice");
        const int off = static_cast<int>(std::llround((g.half_extent - sg.half_extent) / g.h));
        for (int j = 0; j < sg.ny; ++j)
          for (int i = 0; i < sg.nx; ++i) {
            const int ti = i + off, tj = g.dim == 2 ? j + off : 0;
            if (ti < 0 || ti >= g.nx || tj < 0 || tj >= g.ny) continue;
            f.values[g.node(ti, tj)] = src.values[sg.node(i, j)];
          }
      }
      break;
    }
    case InitialDatum::Kind::Zkb: {
      const auto zp = zkb_params(q, g.dim, datum.zkb_c);
      for (size_t n = 0; n < f.values.size(); ++n) {
        const double u = zkb_eval(zp, ev, node_coord(static_cast<int>(n)), datum.zkb_t0);
        f.values[n] = beta_pow(q, u);
      }
      break;
    }
  }
  return f;
}

Field gaussian_smooth(const Field& f, double delta) {
  const Grid& g = *f.grid;
  if (delta < 0.5 * g.h) return f;
  Field out = f;
  const int half = static_cast<int>(std::ceil(4.0 * delta / g.h));
  std::vector<double> kernel(2 * half + 1);
  double ksum = 0;
  for (int k = -half; k <= half; ++k) {
    kernel[k + half] = std::exp(-0.5 * (k * g.h) * (k * g.h) / (delta * delta));
    ksum += kernel[k + half];
  }
  for (auto& w : kernel) w /= ksum;
  auto convolve_axis = [&](const std::vector<double>& in, int axis) {
    std::vector<double> res(in.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double s = 0;
        for (int k = -half; k <= half; ++k) {
          const int ii = axis == 0 ? i + k : i;
          const int jj = axis == 1 ? j + k : j;
          if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
          s += kernel[k + half] * in[g.node(ii, jj)];
        }
        res[g.node(i, j)] = s;
      }
    return res;
  };
  out.values = convolve_axis(out.values, 0);
  if (g.dim == 2) out.values = convolve_axis(out.values, 1);
  return out;
}

Field mollify(const InitialDatum& datum, const FinslerEvaluator& ev, const Grid& g, double delta,
              double q) {
  Field raw = gaussian_smooth(sample_datum(datum, g, ev, q), delta);

  // cosine-squared cutoff: 1 on the half ball, 0 at the ball boundary
  const double R = g.ball_radius;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec x{g.coord[i], g.dim == 2 ? g.coord[j] : 0.0};
      const double s = ev.dual_eval(x) / R;
      double zeta = 1.0;
      if (s >= 1.0)
        zeta = 0.0;
      else if (s > 0.5) {
        const double c = std::cos(M_PI * (s - 0.5));
        zeta = c * c;
      }
      raw.values[g.node(i, j)] *= zeta;
    }
  enforce_mask(raw);
  return raw;
}

double ExhaustionPlan::radius(int level) const { return r0 * std::pow(radius_factor, level); }

void ExhaustionPlan::validate() const {
  if (!(r0 > 0)) throw ValidationError("exhaustion.r0", "must be positive");
  if (levels < 1) throw ValidationError("exhaustion.levels", "need at least one level");
  if (!(radius_factor > 1)) throw ValidationError("exhaustion.factor", "must exceed 1");
  if (!(h > 0)) throw ValidationError("exhaustion.h", "must be positive");
  if (!(r_obs > 0) || r_obs > 0.5 * r0)
    throw ValidationError("exhaustion.r_obs", "window radius must lie in (0, R0/2]");
  if (!(t1 >= 0) || !(t2 > t1)) throw ValidationError("exhaustion.window", "need 0 <= t1 < t2");
}

ExhaustionResult run_exhaustion(const ExhaustionPlan& plan, const InitialDatum& datum, double q,
                                const FinslerEvaluator& ev, const StepConfig& cfg) {
  plan.validate();
  if (!(plan.t2 <= cfg.t_end + 1e-12))
    throw ValidationError("exhaustion.t2", "observation window must end by t_end");
  if (!(cfg.save_every > 0))
    throw ValidationError("time.save_every", "window comparisons need field snapshots");
  const double pad = plan.padding > 0 ? plan.padding : 2 * plan.h;
  const double delta = plan.delta > 0 ? plan.delta : 2 * plan.h;

  ExhaustionResult ex;
  ex.runs.resize(plan.levels);
  for (int n = 0; n < plan.levels; ++n) {
    const double R = plan.radius(n);
    ex.grids.push_back(
        std::make_unique<Grid>(build_grid(R, plan.h, padded_half_extent(R, plan.h, pad, ev), ev)));
  }

  StepConfig level_cfg = cfg;
  if (std::find(level_cfg.monitor_radii.begin(), level_cfg.monitor_radii.end(), plan.r_obs) ==
      level_cfg.monitor_radii.end())
    level_cfg.monitor_radii.push_back(plan.r_obs);

  std::vector<std::function<void()>> tasks;
  for (int n = 0; n < plan.levels; ++n)
    tasks.push_back([&, n] {
      const Grid& g = *ex.grids[n];
      const Field mu_n = mollify(datum, ev, g, delta, q);
      ex.runs[n] = run(g, ev, q, mu_n, level_cfg);
    });
  run_tasks(std::move(tasks));

  auto& rep = ex.report;
  for (int n = 0; n < plan.levels; ++n) {
    rep.radii.push_back(plan.radius(n));
    if (ex.runs[n].status.kind == RunStatusKind::BlowUpSuspected && rep.blowup_level < 0)
      rep.blowup_level = n;
  }
  for (int n = 0; n + 1 < plan.levels; ++n)
    rep.window_errors.push_back(
        window_error(ex.runs[n], ex.runs[n + 1], ev, plan.r_obs, plan.t1, plan.t2));
  rep.converged = rep.window_errors.empty() || rep.window_errors.back() <= plan.tol_window;
  return ex;
}

double window_error(const RunResult& a, const RunResult& b, const FinslerEvaluator& ev,
                    double r_obs, double t1, double t2) {
  const Grid& ga = *a.grid;
  const Grid& gb = *b.grid;
  if (std::abs(ga.h - gb.h) > 1e-12 * ga.h)
    throw ShapeMismatch("window comparison requires equal spacing");
  const int off = static_cast<int>(std::llround((gb.half_extent - ga.half_extent) / ga.h));

  // window nodes on the smaller grid with their twins on the larger one
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < ga.ny; ++j)
    for (int i = 0; i < ga.nx; ++i) {
      const Vec x{ga.coord[i], ga.dim == 2 ? ga.coord[j] : 0.0};
      if (!ev.in_ball(x, r_obs)) continue;
      const int bi = i + off, bj = ga.dim == 2 ? j + off : 0;
      if (bi < 0 || bi >= gb.nx || bj < 0 || bj >= gb.ny)
        throw ShapeMismatch("window leaves the comparison grid");
      pairs.emplace_back(ga.node(i, j), gb.node(bi, bj));
    }

  // shared saved times within the window
  std::vector<double> ts;
  std::vector<double> l1;
  const size_t nt = std::min(a.saved_times.size(), b.saved_times.size());
  for (size_t k = 0; k < nt; ++k) {
    const double t = a.saved_times[k];
    if (std::abs(t - b.saved_times[k]) > 1e-9 * std::max(1.0, t))
      throw ShapeMismatch("save schedules differ between levels");
    if (t < t1 - 1e-12 || t > t2 + 1e-12) continue;
    std::vector<double> diffs(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p)
      diffs[p] = std::abs(a.u_saved[k].values[pairs[p].first] -
                          b.u_saved[k].values[pairs[p].second]);
    ts.push_back(t);
    l1.push_back(pairwise_sum(diffs) * ga.cell_volume());
  }
  if (ts.size() < 2) {
    // degenerate window: fall back to the single snapshot (or zero)
    return l1.empty() ? 0.0 : l1.front() * (t2 - t1);
  }
  const auto cum = cumulative_trapezoid(ts, l1);
  return cum.back();
}

A1Report verify_A1(const ExhaustionResult& ex, const FinslerEvaluator& ev, double radius,
                   double t1, double t2, double delta_exponent) {
  if (!(delta_exponent > 2)) throw ValidationError("a1.delta", "exponent must exceed p = 2");
  A1Report rep;
  rep.delta_exponent = delta_exponent;
  rep.radius = radius;
  rep.t1 = t1;
  rep.t2 = t2;
  for (const auto& runres : ex.runs) {
    const Grid& g = *runres.grid;
    std::vector<int> nodes;
    for (int d = 0; d < g.n_interior; ++d) {
      const int n = g.node_of_dof[d];
      const int i = n % g.nx, j = n / g.nx;
      if (ev.in_ball({g.coord[i], g.dim == 2 ? g.coord[j] : 0.0}, radius)) nodes.push_back(n);
    }
    std::vector<int> faces;
    for (size_t k = 0; k < g.faces.size(); ++k)
      if (ev.in_ball({g.faces[k].cx, g.faces[k].cy}, radius)) faces.push_back(static_cast<int>(k));

    std::vector<double> ts, u_l1_pow, bulk;
    for (size_t k = 0; k < runres.saved_times.size(); ++k) {
      const double t = runres.saved_times[k];
      if (t < t1 - 1e-12 || t > t2 + 1e-12) continue;
      std::vector<double> uu(nodes.size()), vv(nodes.size());
      for (size_t p = 0; p < nodes.size(); ++p) {
        uu[p] = std::abs(runres.u_saved[k].values[nodes[p]]);
        const double v = runres.v_saved[k].values[nodes[p]];
        vv[p] = v * v;
      }
      std::vector<double> gg(faces.size());
      for (size_t p = 0; p < faces.size(); ++p) {
        const double hv = ev.eval(face_gradient(g, runres.u_saved[k], g.faces[faces[p]]));
        gg[p] = hv * hv;
      }
      ts.push_back(t);
      u_l1_pow.push_back(std::pow(pairwise_sum(uu) * g.cell_volume(), delta_exponent));
      bulk.push_back(pairwise_sum(vv) * g.cell_volume() + pairwise_sum(gg) * g.face_weight());
    }
    double value = 0;
    if (ts.size() >= 2) {
      value = cumulative_trapezoid(ts, u_l1_pow).back() + cumulative_trapezoid(ts, bulk).back();
    }
    rep.values.push_back(value);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (double v : rep.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  rep.ratio = (lo > 0) ? hi / lo : (hi == 0 ? 1.0 : std::numeric_limits<double>::infinity());
  rep.pass = rep.ratio <= 2.0;
  return rep;
}

A2Report verify_A2(const ExhaustionResult& ex, const FinslerEvaluator& ev, double radius,
                   const std::vector<double>& t_grid) {
  A2Report rep;
  rep.radius = radius;
  rep.t = t_grid;
  rep.g.assign(t_grid.size(), 0.0);
  for (const auto& runres : ex.runs) {
    // cumulative integral of |v| + H(grad u) over the window, from the
    // per-step monitors when the radius was tracked, else from snapshots
    std::vector<double> ts, integrand;
    bool monitored = false;
    for (const auto& w : runres.monitors.windowed)
      if (std::abs(w.radius - radius) <= 1e-12 * std::max(1.0, radius)) {
        ts = runres.monitors.t;
        integrand.resize(ts.size());
        for (size_t k = 0; k < ts.size(); ++k) integrand[k] = w.v_l1[k] + w.grad_l1[k];
        monitored = true;
        break;
      }
    if (!monitored) {
      const Grid& g = *runres.grid;
      for (size_t k = 0; k < runres.saved_times.size(); ++k) {
        std::vector<double> terms;
        for (int d = 0; d < g.n_interior; ++d) {
          const int n = g.node_of_dof[d];
          const int i = n % g.nx, j = n / g.nx;
          if (ev.in_ball({g.coord[i], g.dim == 2 ? g.coord[j] : 0.0}, radius))
            terms.push_back(std::abs(runres.v_saved[k].values[n]) * g.cell_volume());
        }
        for (size_t fi = 0; fi < g.faces.size(); ++fi)
          if (ev.in_ball({g.faces[fi].cx, g.faces[fi].cy}, radius))
            terms.push_back(ev.eval(face_gradient(g, runres.u_saved[k], g.faces[fi])) *
                            g.face_weight());
        ts.push_back(runres.saved_times[k]);
        integrand.push_back(pairwise_sum(terms));
      }
    }
    const auto cum = cumulative_trapezoid(ts, integrand);
    for (size_t i = 0; i < t_grid.size(); ++i) {
      // interpolate the cumulative integral at t_grid[i]
      const double t = t_grid[i];
      double value = cum.back();
      for (size_t k = 1; k < ts.size(); ++k)
        if (ts[k] >= t) {
          const double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
          value = cum[k - 1] + w * (cum[k] - cum[k - 1]);
          break;
        }
      rep.g[i] = std::max(rep.g[i], value);
    }
  }
  bool monotone = true;
  for (size_t i = 1; i < rep.g.size(); ++i)
    if (rep.g[i] + 1e-15 < rep.g[i - 1]) monotone = false;
  int positive = 0;
  for (double gv : rep.g) positive += gv > 0;
  if (positive >= 2) {
    rep.slope = fit_loglog(rep.t, rep.g).slope;
    rep.pass = monotone && rep.slope >= 0.4;
  } else {
    rep.pass = monotone;  // identically-zero series passes vacuously
  }
  return rep;
}

}  // namespace fdl
