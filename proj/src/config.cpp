#include "fdl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fdl/errors.hpp"

namespace fdl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ValidationError(key, "not a number: '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ValidationError(key, "not an integer: '" + v + "'");
  return static_cast<int>(x);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

NormSpec parse_norm(const std::string& text, int dim) {
  if (text == "euclidean") return NormSpec::euclidean(dim);
  if (text.rfind("pnorm:", 0) == 0) {
    const double s = to_double("problem.norm", text.substr(6));
    if (!(s > 1.0) || !std::isfinite(s))
      throw ValidationError("problem.norm",
                            "pnorm exponent must lie strictly in (1, inf): the unit ball must be "
                            "strictly convex");
    return NormSpec::pnorm(dim, s);
  }
  if (text.rfind("aniso:", 0) == 0) {
    const auto parts = split(text.substr(6), ',');
    if (dim == 1) {
      if (parts.size() != 1) throw ValidationError("problem.norm", "aniso in 1D takes one entry");
      return NormSpec::anisotropic(1, to_double("problem.norm", parts[0]), 0, 0);
    }
    if (parts.size() != 3)
      throw ValidationError("problem.norm", "aniso takes a11,a12,a22 in 2D");
    try {
      return NormSpec::anisotropic(dim, to_double("problem.norm", parts[0]),
                                   to_double("problem.norm", parts[1]),
                                   to_double("problem.norm", parts[2]));
    } catch (const BadNormSpec& e) {
      throw ValidationError("problem.norm", e.what());
    }
  }
  throw ValidationError("problem.norm", "expected euclidean | pnorm:<s> | aniso:<a11,a12,a22>");
}

InitialDatum parse_datum(const std::string& text, double q) {
  if (text == "zero") return InitialDatum::zero();
  auto args_of = [&](const std::string& prefix) {
    return split(text.substr(prefix.size()), ',');
  };
  try {
    if (text.rfind("dirac:", 0) == 0) {
      const auto a = args_of("dirac:");
      if (a.size() < 2) throw ValidationError("problem.datum", "dirac:<mass>,<width>");
      Vec center{0, 0};
      if (a.size() >= 3) center[0] = to_double("problem.datum", a[2]);
      if (a.size() >= 4) center[1] = to_double("problem.datum", a[3]);
      return InitialDatum::dirac_bump(to_double("problem.datum", a[0]),
                                      to_double("problem.datum", a[1]), center);
    }
    if (text.rfind("density:", 0) == 0) {
      const auto a = args_of("density:");
      if (a.size() != 2) throw ValidationError("problem.datum", "density:<gamma>,<amplitude>");
      return InitialDatum::density(to_double("problem.datum", a[0]),
                                   to_double("problem.datum", a[1]));
    }
    if (text.rfind("critical:", 0) == 0) {
      const auto a = args_of("critical:");
      if (a.size() != 1) throw ValidationError("problem.datum", "critical:<amplitude>");
      return InitialDatum::critical_growth(to_double("problem.datum", a[0]), q);
    }
    if (text.rfind("zkb:", 0) == 0) {
      const auto a = args_of("zkb:");
      if (a.size() != 2) throw ValidationError("problem.datum", "zkb:<C>,<t0>");
      return InitialDatum::zkb(to_double("problem.datum", a[0]), to_double("problem.datum", a[1]));
    }
  } catch (const OutOfRegime& e) {
    throw ValidationError("problem.datum", e.what());
  }
  throw ValidationError("problem.datum",
                        "expected zero | dirac:... | density:... | critical:... | zkb:...");
}

Config parse_config(const std::string& text) {
  static const std::set<std::string> known_sections = {"problem", "grid",   "time",
                                                       "solver",  "checks", "output"};
  std::map<std::string, std::map<std::string, std::string>> kv;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section)) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    if (section.empty()) throw ParseError(line_no, "key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (kv[section].count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    kv[section][key] = value;
  }

  Config c;
  auto take = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    auto s = kv.find(sec);
    if (s == kv.end()) return std::nullopt;
    auto it = s->second.find(key);
    if (it == s->second.end()) return std::nullopt;
    std::string v = it->second;
    s->second.erase(it);
    return v;
  };

  // [problem]
  if (auto v = take("problem", "q")) c.q = to_double("problem.q", *v);
  if (!(c.q > 1)) throw ValidationError("problem.q", "must exceed 1");
  if (auto v = take("problem", "N")) c.dim = to_int("problem.N", *v);
  if (c.dim != 1 && c.dim != 2) throw ValidationError("problem.N", "dimension must be 1 or 2");
  if (auto v = take("problem", "norm")) c.norm_text = *v;
  c.norm = parse_norm(c.norm_text, c.dim);
  if (auto v = take("problem", "datum")) c.datum_text = *v;
  c.datum = parse_datum(c.datum_text, c.q);

  // [grid]
  if (auto v = take("grid", "R")) c.radius = to_double("grid.R", *v);
  if (!(c.radius > 0)) throw ValidationError("grid.R", "must be positive");
  if (auto v = take("grid", "h")) c.h = to_double("grid.h", *v);
  if (!(c.h > 0)) throw ValidationError("grid.h", "must be positive");
  if (auto v = take("grid", "L")) c.half_extent = to_double("grid.L", *v);
  if (auto v = take("grid", "mollify_delta"))
    c.mollify_delta = to_double("grid.mollify_delta", *v);
  if (auto v = take("grid", "levels")) {
    c.has_exhaustion = true;
    c.exhaustion.levels = to_int("grid.levels", *v);
  }
  if (auto v = take("grid", "R0")) c.exhaustion.r0 = to_double("grid.R0", *v);
  if (auto v = take("grid", "factor")) c.exhaustion.radius_factor = to_double("grid.factor", *v);
  if (auto v = take("grid", "R_obs")) c.exhaustion.r_obs = to_double("grid.R_obs", *v);
  if (auto v = take("grid", "t1")) c.exhaustion.t1 = to_double("grid.t1", *v);
  if (auto v = take("grid", "t2")) c.exhaustion.t2 = to_double("grid.t2", *v);
  if (auto v = take("grid", "delta")) c.exhaustion.delta = to_double("grid.delta", *v);
  c.exhaustion.h = c.h;

  // [time]
  if (auto v = take("time", "dt0")) c.dt0 = to_double("time.dt0", *v);
  if (auto v = take("time", "t_end")) c.t_end = to_double("time.t_end", *v);
  if (auto v = take("time", "save_every")) c.save_every = to_double("time.save_every", *v);
  if (!(c.dt0 > 0)) throw ValidationError("time.dt0", "must be positive");
  if (!(c.t_end > 0)) throw ValidationError("time.t_end", "must be positive");

  // [solver]
  if (auto v = take("solver", "newton_tol")) c.solver.newton_tol = to_double("solver.newton_tol", *v);
  if (!(c.solver.newton_tol > 0)) throw ValidationError("solver.newton_tol", "must be positive");
  if (auto v = take("solver", "max_newton")) c.solver.max_newton = to_int("solver.max_newton", *v);
  if (auto v = take("solver", "jacobian_eps"))
    c.solver.jacobian_eps = to_double("solver.jacobian_eps", *v);
  if (auto v = take("solver", "dt_min_rel")) c.solver.dt_min_rel = to_double("solver.dt_min_rel", *v);
  if (auto v = take("solver", "sup_cap")) c.solver.sup_cap = to_double("solver.sup_cap", *v);
  if (auto v = take("solver", "sup_cap_rel"))
    c.solver.sup_cap_rel = to_double("solver.sup_cap_rel", *v);
  if (auto v = take("solver", "cap_radius")) c.solver.cap_radius = to_double("solver.cap_radius", *v);
  if (auto v = take("solver", "dt_growth")) c.solver.dt_growth = to_double("solver.dt_growth", *v);
  if (auto v = take("solver", "dt_max")) c.solver.dt_max = to_double("solver.dt_max", *v);
  if (auto v = take("solver", "monitor_radii"))
    for (const auto& part : split(*v, ','))
      if (!part.empty()) c.solver.monitor_radii.push_back(to_double("solver.monitor_radii", part));
  if (!(c.solver.dt_min_rel * c.t_end < c.dt0))
    throw ValidationError("solver.dt_min_rel", "dt_min must stay below dt0");

  // [checks]
  if (auto v = take("checks", "which"))
    for (const auto& part : split(*v, ','))
      if (!part.empty()) c.checks.push_back(part);
  if (auto v = take("checks", "c")) c.existence_c = to_double("checks.c", *v);
  if (auto v = take("checks", "report_radius"))
    c.report_radius = to_double("checks.report_radius", *v);
  if (auto v = take("checks", "growth_r")) c.growth_base_radius = to_double("checks.growth_r", *v);
  if (auto v = take("checks", "t_lo")) c.t_lo = to_double("checks.t_lo", *v);
  if (auto v = take("checks", "t_hi")) c.t_hi = to_double("checks.t_hi", *v);
  if (auto v = take("checks", "amplitudes"))
    for (const auto& part : split(*v, ','))
      if (!part.empty()) c.amplitudes.push_back(to_double("checks.amplitudes", part));
  if (auto v = take("checks", "scan_R")) c.scan_ball_radius = to_double("checks.scan_R", *v);
  if (auto v = take("checks", "scan_cap_rel"))
    c.scan_sup_cap_rel = to_double("checks.scan_cap_rel", *v);
  if (auto v = take("checks", "scan_cap_radius"))
    c.scan_cap_radius = to_double("checks.scan_cap_radius", *v);

  // [output]
  if (auto v = take("output", "dir")) c.output_dir = *v;
  if (auto v = take("output", "seed")) {
    const long long s = to_int("output.seed", *v);
    if (s < 0) throw ValidationError("output.seed", "must be nonnegative");
    c.seed = static_cast<uint64_t>(s);
  }

  // anything left over is unknown
  for (const auto& [sec, keys] : kv)
    for (const auto& [key, value] : keys)
      throw ValidationError(sec + "." + key, "unknown key");

  return c;
}

namespace {

// Run manifests flatten the config into dotted keys (problem.q = ...). Fold
// them back into sectioned form so a manifest is itself a valid config and
// re-running from it reproduces the run; non-config manifest entries
// (status, outputs, derived values) are dropped.
std::string manifest_to_config(const std::string& text) {
  static const std::set<std::string> sections = {"problem", "grid",   "time",
                                                 "solver",  "checks", "output"};
  std::map<std::string, std::vector<std::string>> grouped;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = trim(line.substr(0, eq));
    const auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    if (!sections.count(section)) continue;
    if (section == "output" && name != "dir" && name != "seed") continue;
    grouped[section].push_back(name + " =" + line.substr(eq + 1));
  }
  std::string out;
  for (const auto& [section, lines] : grouped) {
    out += "[" + section + "]\n";
    for (const auto& l : lines) out += l + "\n";
  }
  return out;
}

}  // namespace

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  // a file of dotted keys with no section headers is a run manifest
  if (text.find('[') == std::string::npos && text.find(". ") == std::string::npos &&
      text.find('=') != std::string::npos) {
    bool dotted = false;
    std::istringstream probe(text);
    std::string line;
    while (std::getline(probe, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      dotted = trim(line.substr(0, eq)).find('.') != std::string::npos;
      break;
    }
    if (dotted) text = manifest_to_config(text);
  }
  return parse_config(text);
}

double Config::resolved_half_extent() const {
  if (half_extent > 0) return std::ceil(half_extent / h - 1e-9) * h;
  return padded_half_extent(radius, h, 2 * h, FinslerEvaluator(norm));
}

StepConfig Config::resolved_step_config() const {
  StepConfig s = solver;
  s.dt0 = dt0;
  s.t_end = t_end;
  s.save_every = save_every;
  return s;
}

std::vector<std::pair<std::string, std::string>> config_key_values(const Config& c) {
  auto num = [](double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("problem.q", num(c.q));
  kv.emplace_back("problem.N", std::to_string(c.dim));
  kv.emplace_back("problem.norm", c.norm_text);
  kv.emplace_back("problem.datum", c.datum_text);
  kv.emplace_back("grid.R", num(c.radius));
  kv.emplace_back("grid.h", num(c.h));
  kv.emplace_back("grid.L", num(c.resolved_half_extent()));
  kv.emplace_back("grid.mollify_delta", num(c.mollify_delta));
  if (c.has_exhaustion) {
    kv.emplace_back("grid.levels", std::to_string(c.exhaustion.levels));
    kv.emplace_back("grid.R0", num(c.exhaustion.r0));
    kv.emplace_back("grid.factor", num(c.exhaustion.radius_factor));
    kv.emplace_back("grid.R_obs", num(c.exhaustion.r_obs));
    kv.emplace_back("grid.t1", num(c.exhaustion.t1));
    kv.emplace_back("grid.t2", num(c.exhaustion.t2));
  }
  kv.emplace_back("time.dt0", num(c.dt0));
  kv.emplace_back("time.t_end", num(c.t_end));
  kv.emplace_back("time.save_every", num(c.save_every));
  kv.emplace_back("solver.newton_tol", num(c.solver.newton_tol));
  kv.emplace_back("solver.max_newton", std::to_string(c.solver.max_newton));
  kv.emplace_back("solver.jacobian_eps", num(c.solver.jacobian_eps));
  kv.emplace_back("solver.dt_min_rel", num(c.solver.dt_min_rel));
  kv.emplace_back("solver.sup_cap", num(c.solver.sup_cap));
  if (c.solver.sup_cap_rel > 0) kv.emplace_back("solver.sup_cap_rel", num(c.solver.sup_cap_rel));
  if (c.solver.cap_radius > 0) kv.emplace_back("solver.cap_radius", num(c.solver.cap_radius));
  kv.emplace_back("solver.dt_growth", num(c.solver.dt_growth));
  if (c.solver.dt_max > 0) kv.emplace_back("solver.dt_max", num(c.solver.dt_max));
  if (!c.solver.monitor_radii.empty()) {
    std::string list;
    for (double r : c.solver.monitor_radii) list += (list.empty() ? "" : ",") + num(r);
    kv.emplace_back("solver.monitor_radii", list);
  }
  if (!c.checks.empty()) {
    std::string list;
    for (const auto& w : c.checks) list += (list.empty() ? "" : ",") + w;
    kv.emplace_back("checks.which", list);
  }
  kv.emplace_back("checks.c", num(c.existence_c));
  kv.emplace_back("checks.report_radius", num(c.report_radius));
  kv.emplace_back("checks.growth_r", num(c.growth_base_radius));
  if (c.t_lo > 0) kv.emplace_back("checks.t_lo", num(c.t_lo));
  if (c.t_hi > 0) kv.emplace_back("checks.t_hi", num(c.t_hi));
  if (!c.amplitudes.empty()) {
    std::string list;
    for (double a : c.amplitudes) list += (list.empty() ? "" : ",") + num(a);
    kv.emplace_back("checks.amplitudes", list);
    kv.emplace_back("checks.scan_R", num(c.scan_ball_radius));
    kv.emplace_back("checks.scan_cap_rel", num(c.scan_sup_cap_rel));
    kv.emplace_back("checks.scan_cap_radius", num(c.scan_cap_radius));
  }
  kv.emplace_back("output.dir", c.output_dir);
  kv.emplace_back("output.seed", std::to_string(c.seed));
  return kv;
}

}  // namespace fdl
