#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdl/estimates.hpp"

namespace fdl {

// Line-oriented `key = value` configuration under [section] headers with `#`
// comments; unknown sections or keys are errors so typos cannot silently
// change an experiment.
struct Config {
  // [problem]
  double q = 2;
  int dim = 1;
  NormSpec norm = NormSpec::euclidean(1);
  std::string norm_text = "euclidean";
  InitialDatum datum;
  std::string datum_text = "zero";

  // [grid]
  double radius = 1;
  double h = 1.0 / 32;
  double half_extent = 0;   // 0 = derived from the dual-ball extent, on the lattice
  double mollify_delta = 0;  // > 0: smooth + cut off the datum at this width
  bool has_exhaustion = false;
  ExhaustionPlan exhaustion;

  // [time]
  double dt0 = 1e-3;
  double t_end = 1;
  double save_every = 0;

  // [solver]
  StepConfig solver;

  // [checks]
  std::vector<std::string> checks;  // which reports to emit
  double existence_c = 1;
  double report_radius = 1;
  double growth_base_radius = 0.5;
  double t_lo = 0, t_hi = 0;  // report window; 0,0 = full run
  std::vector<double> amplitudes;
  double scan_ball_radius = 8;
  double scan_sup_cap_rel = 30;
  double scan_cap_radius = 0.5;

  // [output]
  std::string output_dir = "out";
  uint64_t seed = 1;

  double resolved_half_extent() const;
  StepConfig resolved_step_config() const;
};

NormSpec parse_norm(const std::string& text, int dim);
InitialDatum parse_datum(const std::string& text, double q);

Config parse_config(const std::string& text);
Config load_config_file(const std::string& path);

// Full resolved key=value view for embedding in run manifests.
std::vector<std::pair<std::string, std::string>> config_key_values(const Config& c);

}  // namespace fdl
