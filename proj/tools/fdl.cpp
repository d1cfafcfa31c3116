// Batch front end: every subcommand reads one config file, writes CSVs plus a
// run manifest under [output].dir, and exits 0 only when all requested checks
// pass (1 = check failure, 2 = config error, 3 = solver error).

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "fdl/config.hpp"
#include "fdl/errors.hpp"
#include "fdl/io.hpp"

namespace fs = std::filesystem;
using namespace fdl;

namespace {

struct Ctx {
  Config cfg;
  FinslerEvaluator ev;
  fs::path out;
  Manifest manifest;

  explicit Ctx(const std::string& config_path)
      : cfg(load_config_file(config_path)), ev(cfg.norm), out(cfg.output_dir) {
    fs::create_directories(out);
    for (const auto& [k, v] : config_key_values(cfg)) manifest.set(k, v);
  }

  // manifests list outputs relative to [output].dir, where they live
  std::string path(const std::string& name) {
    manifest.add_output(name);
    return (out / name).string();
  }

  void finish(const std::string& manifest_name) { manifest.write((out / manifest_name).string()); }
};

void print_check(const CheckLine& c) {
  std::cout << "CHECK " << c.name << ' ' << (c.pass ? "PASS" : "FAIL")
            << " value=" << format_number(c.value) << " expected=" << format_number(c.expected)
            << " tol=" << format_number(c.tol) << "\n";
}

int emit_report(Ctx& ctx, const EstimateReport& rep) {
  if (!rep.columns.empty())
    write_csv(ctx.path(rep.title + ".csv"), rep.column_names, rep.columns);
  bool all = true;
  for (const auto& c : rep.checks) {
    print_check(c);
    all &= c.pass;
  }
  return all ? 0 : 1;
}

const char* status_name(RunStatusKind k) {
  switch (k) {
    case RunStatusKind::Completed: return "Completed";
    case RunStatusKind::BlowUpSuspected: return "BlowUpSuspected";
    case RunStatusKind::SolverFailed: return "SolverFailed";
  }
  return "?";
}

RunResult solve_from_config(Ctx& ctx, const Grid& g) {
  const Field v0 = ctx.cfg.mollify_delta > 0
                       ? mollify(ctx.cfg.datum, ctx.ev, g, ctx.cfg.mollify_delta, ctx.cfg.q)
                       : sample_datum(ctx.cfg.datum, g, ctx.ev, ctx.cfg.q);
  StepConfig sc = ctx.cfg.resolved_step_config();
  return run(g, ctx.ev, ctx.cfg.q, v0, sc);
}

int cmd_verify_norm(Ctx& ctx) {
  const auto rep = verify_identities(ctx.ev, 10000, ctx.cfg.seed);
  const bool ok = rep.pass(1e-10, 1e-12);
  write_csv(ctx.path("norm_identities.csv"),
            {"euler", "dual_grad", "flux_dual", "duality", "monotone_min"},
            {{rep.max_euler_residual},
             {rep.max_dual_grad_residual},
             {rep.max_flux_dual_residual},
             {rep.max_duality_violation},
             {rep.min_monotone_pairing}});
  CheckLine c{"norm_identities", ok, rep.max_euler_residual, 0, 1e-10};
  print_check(c);
  ctx.manifest.set("status", ok ? "PASS" : "FAIL");
  ctx.finish("verify_norm.manifest");
  return ok ? 0 : 1;
}

int cmd_zkb(Ctx& ctx) {
  const double c_free = ctx.cfg.datum.kind == InitialDatum::Kind::Zkb ? ctx.cfg.datum.zkb_c
                                                                      : 1.0 / 12.0;
  const auto zp = zkb_params(ctx.cfg.q, ctx.cfg.dim, c_free);
  std::cout << "alpha=" << format_number(zp.alpha) << " beta=" << format_number(zp.beta)
            << " k=" << format_number(zp.k) << " d=" << format_number(zp.d) << "\n";
  ctx.manifest.set_number("zkb.alpha", zp.alpha);
  ctx.manifest.set_number("zkb.beta", zp.beta);
  ctx.manifest.set_number("zkb.k", zp.k);
  ctx.manifest.set_number("zkb.d", zp.d);
  std::vector<double> rs, ts, us;
  const double t0 = ctx.cfg.datum.kind == InitialDatum::Kind::Zkb ? ctx.cfg.datum.zkb_t0 : 1.0;
  // radial profile in the dual norm: scale a unit-dual-radius direction
  const Vec dir = (1.0 / ctx.ev.dual_eval({1, 0})) * Vec{1, 0};
  for (double t = t0; t <= ctx.cfg.t_end * (1 + 1e-12); t *= 2) {
    const double edge = zkb_support_radius(zp, t);
    const int n = 256;
    for (int i = 0; i <= n; ++i) {
      const double r = 1.2 * edge * i / n;
      rs.push_back(r);
      ts.push_back(t);
      us.push_back(zkb_eval(zp, ctx.ev, r * dir, t));
    }
  }
  write_csv(ctx.path("zkb.csv"), {"r", "t", "u"}, {rs, ts, us});
  ctx.finish("zkb.manifest");
  return 0;
}

int cmd_solve(Ctx& ctx) {
  const Grid g = build_grid(ctx.cfg.radius, ctx.cfg.h, ctx.cfg.resolved_half_extent(), ctx.ev);
  const RunResult res = solve_from_config(ctx, g);
  write_monitor_csv(ctx.path("monitors.csv"), res.monitors);
  write_field_csv(ctx.path("final_u.csv"), res.u_saved.back());
  write_field_csv(ctx.path("final_v.csv"), res.v_saved.back());
  ctx.manifest.set("status", status_name(res.status.kind));
  ctx.manifest.set_number("t_star", res.status.time);
  ctx.manifest.set_number("steps", static_cast<double>(res.monitors.t.size()) - 1);
  ctx.finish("solve.manifest");
  std::cout << "status " << status_name(res.status.kind) << " t=" << format_number(res.status.time)
            << "\n";
  // blow-up is a finding, not an error; an unconverged solve is an error
  return res.status.kind == RunStatusKind::SolverFailed ? 3 : 0;
}

int cmd_estimates(Ctx& ctx) {
  Config& c = ctx.cfg;
  // make sure the windowed monitors the reports need are recorded
  auto& radii = c.solver.monitor_radii;
  for (double r : {c.report_radius, 2 * c.report_radius})
    if (std::find(radii.begin(), radii.end(), r) == radii.end()) radii.push_back(r);
  const Grid g = build_grid(c.radius, c.h, c.resolved_half_extent(), ctx.ev);
  const RunResult res = solve_from_config(ctx, g);
  write_monitor_csv(ctx.path("monitors.csv"), res.monitors);
  ctx.manifest.set("status", status_name(res.status.kind));
  if (res.status.kind == RunStatusKind::SolverFailed) {
    ctx.finish("estimates.manifest");
    std::cerr << "solver failed at t = " << format_number(res.status.time) << "\n";
    return 3;
  }

  const double t_lo = c.t_lo > 0 ? c.t_lo : res.monitors.t.back() * 0.1;
  const double t_hi = c.t_hi > 0 ? c.t_hi : res.monitors.t.back();
  int rc = 0;
  auto want = [&](const std::string& name) {
    return c.checks.empty() ||
           std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
  };
  if (c.q > 2 && want("fde"))
    rc |= emit_report(ctx, fde_report(res, ctx.ev, c.q, c.dim, c.report_radius, t_lo, t_hi));
  if (c.q < 2 && want("pme"))
    rc |= emit_report(ctx, pme_report(res, ctx.ev, c.q, c.dim, c.growth_base_radius,
                                      c.report_radius, t_lo, t_hi));
  if (c.q < 2 && want("support")) {
    const double threshold = 1e-6 * res.monitors.sup_u.front();
    const auto sr = support_radius(res, ctx.ev, threshold);
    write_csv(ctx.path("support_radius.csv"), {"t", "radius"}, {sr.t, sr.radius});
    ctx.manifest.set_number("support_slope", sr.fitted_slope);
    if (c.datum.kind == InitialDatum::Kind::Zkb && sr.t.size() >= 2) {
      // interface law on the self-similar clock: slope equals beta
      const auto zp = zkb_params(c.q, c.dim, c.datum.zkb_c);
      std::vector<double> t_abs = sr.t;
      for (auto& tt : t_abs) tt += c.datum.zkb_t0;
      const double slope = fit_loglog(t_abs, sr.radius).slope;
      CheckLine line{"interface_slope", std::abs(slope - zp.beta) <= 0.05 * zp.beta, slope,
                     zp.beta, 0.05 * zp.beta};
      print_check(line);
      rc |= line.pass ? 0 : 1;
    }
  }
  if (c.q < 2 && want("majorant")) {
    const auto mc = majorant_consistency(res, ctx.ev, c.q, c.dim, c.growth_base_radius, 1.0, 1.0);
    write_csv(ctx.path("majorant.csv"), {"t", "phi", "psi"}, {mc.t, mc.phi, mc.psi});
    CheckLine line{"majorant_dominates", mc.majorant_dominates, mc.c1_min, mc.c1_min, 0};
    print_check(line);
    ctx.manifest.set_number("c1_min", mc.c1_min);
    ctx.manifest.set_number("c5_min", mc.c5_min);
    rc |= mc.majorant_dominates ? 0 : 1;
  }
  if (c.q < 2 && want("existence")) {
    const Field mu = sample_datum(c.datum, g, ctx.ev, c.q);
    const auto gn = growth_norm(mu, ctx.ev, c.growth_base_radius, c.q, c.dim);
    ctx.manifest.set_number("growth_norm", gn.supremum);
    ctx.manifest.set_number("existence_time", existence_time(gn, c.existence_c, c.q));
  }
  ctx.finish("estimates.manifest");
  return rc;
}

int cmd_exhaust(Ctx& ctx) {
  Config& c = ctx.cfg;
  if (!c.has_exhaustion) throw ValidationError("grid.levels", "exhaust needs an exhaustion plan");
  const auto ex = run_exhaustion(c.exhaustion, c.datum, c.q, ctx.ev, c.resolved_step_config());
  const auto a1 = verify_A1(ex, ctx.ev, c.exhaustion.r_obs, c.exhaustion.t1, c.exhaustion.t2, 3.0);
  std::vector<double> nn, rr, ee, a1v;
  for (size_t n = 0; n < ex.runs.size(); ++n) {
    nn.push_back(static_cast<double>(n));
    rr.push_back(ex.report.radii[n]);
    ee.push_back(n < ex.report.window_errors.size() ? ex.report.window_errors[n] : 0.0);
    a1v.push_back(a1.values[n]);
  }
  write_csv(ctx.path("exhaust.csv"), {"n", "R_n", "e_n", "A1_value"}, {nn, rr, ee, a1v});

  std::vector<double> tgrid;
  for (double t = c.exhaustion.t1 / 8; t <= c.exhaustion.t1 * (1 + 1e-12); t *= std::sqrt(2.0))
    tgrid.push_back(t);
  const auto a2 = verify_A2(ex, ctx.ev, c.exhaustion.r_obs, tgrid);

  bool decreasing = true;
  for (size_t i = 1; i < ex.report.window_errors.size(); ++i)
    decreasing &= ex.report.window_errors[i] < ex.report.window_errors[i - 1];
  // converged-at-tolerance levels count: gaps at solver noise need not order
  const bool cauchy = decreasing || ex.report.converged;
  const bool pass = cauchy && a1.pass && a2.pass && ex.report.blowup_level < 0;
  print_check({"cauchy_decreasing", cauchy,
               ex.report.window_errors.empty() ? 0 : ex.report.window_errors.back(), 0, 0});
  print_check({"a1_ratio", a1.pass, a1.ratio, 1, 1});
  print_check({"a2_slope", a2.pass, a2.slope, 0.75, 0.35});
  std::cout << (pass ? "PASS" : "FAIL") << " exhaustion with " << ex.runs.size() << " levels\n";
  ctx.manifest.set("status", pass ? "PASS" : "FAIL");
  ctx.finish("exhaust.manifest");
  return pass ? 0 : 1;
}

int cmd_blowup_scan(Ctx& ctx) {
  Config& c = ctx.cfg;
  if (c.amplitudes.empty()) throw ValidationError("checks.amplitudes", "scan needs amplitudes");
  BlowupScanConfig scan;
  scan.ball_radius = c.scan_ball_radius;
  scan.h = c.h;
  scan.sup_cap_rel = c.scan_sup_cap_rel;
  scan.cap_radius = c.scan_cap_radius;
  const auto rep =
      blowup_scan(c.amplitudes, c.datum, c.q, c.dim, ctx.ev, scan, c.resolved_step_config());
  const int rc = emit_report(ctx, rep);
  ctx.finish("blowup_scan.manifest");
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler nonlinear-diffusion laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  int rc = 0;
  for (const auto& [name, fn] : std::vector<std::pair<std::string, int (*)(Ctx&)>>{
           {"solve", cmd_solve},
           {"zkb", cmd_zkb},
           {"verify-norm", cmd_verify_norm},
           {"exhaust", cmd_exhaust},
           {"estimates", cmd_estimates},
           {"blowup-scan", cmd_blowup_scan}}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "config file")->required();
    int (*body)(Ctx&) = fn;
    sub->callback([&config_path, &rc, body] {
      Ctx ctx(config_path);
      rc = body(ctx);
    });
  }
  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BadNormSpec& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const AllCensored& e) {
    std::cerr << "scan error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
