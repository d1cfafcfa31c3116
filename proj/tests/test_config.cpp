#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdl/config.hpp"
#include "fdl/errors.hpp"

using namespace fdl;

TEST_CASE("minimal config gets defaults") {
  const auto c = parse_config(R"(
[problem]
q = 1.5
norm = euclidean
[grid]
R = 1
h = 0.03125
[time]
t_end = 2
)");
  CHECK(c.q == doctest::Approx(1.5));
  CHECK(c.dim == 1);
  CHECK(c.norm.kind == NormKind::Euclidean);
  CHECK(c.t_end == doctest::Approx(2.0));
  CHECK(c.solver.newton_tol > 0);
  CHECK(c.resolved_half_extent() >= c.radius + 2 * c.h - 1e-12);
  // resolved extent sits on the lattice
  const double cells = c.resolved_half_extent() / c.h;
  CHECK(cells == doctest::Approx(std::round(cells)).epsilon(1e-12));
}

TEST_CASE("q must exceed one") {
  CHECK_THROWS_AS((void)parse_config("[problem]\nq = 0.5\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_config("[problem]\nq = 1\n"), ValidationError);
}

TEST_CASE("strict convexity gate on pnorm") {
  CHECK_THROWS_AS((void)parse_config("[problem]\nnorm = pnorm:1.0\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_config("[problem]\nnorm = pnorm:inf\n"), ValidationError);
  const auto c = parse_config("[problem]\nnorm = pnorm:1.5\n");
  CHECK(c.norm.kind == NormKind::PNorm);
  CHECK(c.norm.exponent == doctest::Approx(1.5));
}

TEST_CASE("norm grammar") {
  auto c = parse_config("[problem]\nN = 2\nnorm = aniso:2,1,2\n");
  CHECK(c.norm.kind == NormKind::Anisotropic);
  CHECK(c.norm.a.m01 == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)parse_config("[problem]\nN = 2\nnorm = aniso:1,2,1\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_config("[problem]\nnorm = taxicab\n"), ValidationError);
}

TEST_CASE("datum grammar") {
  auto c = parse_config("[problem]\nq = 1.5\ndatum = critical:0.25\n");
  CHECK(c.datum.kind == InitialDatum::Kind::CriticalGrowth);
  CHECK(c.datum.growth_exponent == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)parse_config("[problem]\nq = 3\ndatum = critical:0.25\n"),
                  ValidationError);
  auto z = parse_config("[problem]\nq = 1.5\ndatum = zkb:0.08333333333333333,1\n");
  CHECK(z.datum.kind == InitialDatum::Kind::Zkb);
  auto dd = parse_config("[problem]\ndatum = dirac:1,0.25,0.5\n");
  CHECK(dd.datum.center[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)parse_config("[problem]\ndatum = bump\n"), ValidationError);
}

TEST_CASE("unknown keys and sections are rejected") {
  CHECK_THROWS_AS((void)parse_config("[problem]\nqq = 2\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_config("[physics]\nq = 2\n"), ParseError);
  CHECK_THROWS_AS((void)parse_config("q = 2\n"), ParseError);
  CHECK_THROWS_AS((void)parse_config("[problem]\nq\n"), ParseError);
  CHECK_THROWS_AS((void)parse_config("[problem]\nq = 2\nq = 3\n"), ParseError);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    (void)parse_config("[problem]\n\n\nbroken line\n");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
  }
}

TEST_CASE("comments and whitespace are tolerated") {
  const auto c = parse_config(R"(
# leading comment
[problem]   # section comment
q = 2.5     # fde
  N  =  2
)");
  CHECK(c.q == doctest::Approx(2.5));
  CHECK(c.dim == 2);
}

TEST_CASE("lists parse") {
  const auto c = parse_config(R"(
[solver]
monitor_radii = 1, 2, 4
[checks]
which = fde, support
amplitudes = 0.5,1,2
)");
  CHECK(c.solver.monitor_radii.size() == 3);
  CHECK(c.checks.size() == 2);
  CHECK(c.amplitudes[2] == doctest::Approx(2.0));
}

TEST_CASE("manifest embed is complete and deterministic") {
  const auto c = parse_config("[problem]\nq = 1.5\n[output]\nseed = 7\n");
  const auto kv = config_key_values(c);
  bool found_q = false, found_seed = false;
  for (const auto& [k, v] : kv) {
    if (k == "problem.q") {
      found_q = true;
      CHECK(v == "1.5");
    }
    if (k == "output.seed") {
      found_seed = true;
      CHECK(v == "7");
    }
  }
  CHECK(found_q);
  CHECK(found_seed);
  CHECK(config_key_values(c) == kv);
}

TEST_CASE("dt_min must stay below dt0") {
  CHECK_THROWS_AS((void)parse_config("[time]\ndt0 = 1e-4\n[solver]\ndt_min_rel = 0.5\n"),
                  ValidationError);
}
