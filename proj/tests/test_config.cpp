#include "chslab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "chslab/errors.hpp"
#include "doctest.h"

using namespace chslab;

namespace {

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& text) : path(name) {
    std::ofstream out(path);
    out << text;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

bool mentions(const std::vector<std::string>& violations, const std::string& needle) {
  for (const std::string& v : violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("empty config resolves to the documented defaults") {
  TempFile f("cfg_empty.toml", "");
  AppConfig c = parse_config(f.path);
  CHECK(c.nx == 32);
  CHECK(c.ny == 32);
  CHECK(c.lx == 1.0);
  CHECK(c.ly == 1.0);
  CHECK(c.run.tau == 1.0);
  CHECK(c.run.kappa == 1.0);
  CHECK(c.run.eps == 0.1);
  CHECK(c.run.pot.bulk.kind == GraphKind::cubic);
  CHECK(c.run.pot.pi.slope == -1.0);
  CHECK(c.run.dt == 0.005);
  CHECK(c.run.t_end == 0.1);
  CHECK(c.u0.kind == "constant");
  CHECK(c.g.kind == "zero");
  CHECK(c.snapshot_every == 0);
  CHECK(c.out_dir == "out");

  std::string echo = render_config(c);
  CHECK(echo.find("grid.nx = 32") != std::string::npos);
  CHECK(echo.find("physics.tau = 1") != std::string::npos);
  CHECK(echo.find("potentials.bulk.kind = cubic") != std::string::npos);
  CHECK(echo.find("solver.splitting = implicit-convex") != std::string::npos);
  CHECK(echo.find("data.u0.kind = constant") != std::string::npos);
}

TEST_CASE("full config file round-trips every section") {
  TempFile f("cfg_full.toml",
             "# exercise all sections\n"
             "[grid]\n"
             "nx = 16\n"
             "ny = 12\n"
             "lx = 2.0\n"
             "ly = 1.5\n"
             "[physics]\n"
             "tau = 0.0   # trailing comment\n"
             "kappa = 0.25\n"
             "eps = 0.05\n"
             "[potentials]\n"
             "bulk.kind = \"linear\"\n"
             "bulk.scale = 2.0\n"
             "boundary.kind = \"logarithmic\"\n"
             "boundary.scale = 1.5\n"
             "pi.slope = 0.0\n"
             "pi_gamma.slope = -0.5\n"
             "rho = 2.0\n"
             "c0 = 0.5\n"
             "same_growth = false\n"
             "[data]\n"
             "u0.kind = \"fourier\"\n"
             "u0.mean = 0.1\n"
             "u0.amplitude = 0.2\n"
             "u0.mode_x = 2\n"
             "u0.mode_y = 1\n"
             "g.kind = \"cosine\"\n"
             "g.amplitude = 3.0\n"
             "g.mode = 2\n"
             "g_gamma.kind = \"constant\"\n"
             "g_gamma.value = 0.7\n"
             "[time]\n"
             "dt = 0.01\n"
             "t_end = 0.2\n"
             "[solver]\n"
             "newton_tol = 1e-9\n"
             "newton_max_iter = 30\n"
             "linear_tol = 1e-8\n"
             "splitting = \"fully-implicit\"\n"
             "[output]\n"
             "directory = \"results\"\n"
             "snapshot_every = 5\n");
  AppConfig c = parse_config(f.path);
  CHECK(c.nx == 16);
  CHECK(c.ny == 12);
  CHECK(c.lx == 2.0);
  CHECK(c.ly == 1.5);
  CHECK(c.run.tau == 0.0);
  CHECK(c.run.kappa == 0.25);
  CHECK(c.run.eps == 0.05);
  CHECK(c.run.pot.bulk.kind == GraphKind::linear);
  CHECK(c.run.pot.bulk.scale == 2.0);
  CHECK(c.run.pot.boundary.kind == GraphKind::logarithmic);
  CHECK(c.run.pot.boundary.scale == 1.5);
  CHECK(c.run.pot.pi.slope == 0.0);
  CHECK(c.run.pot.pi_gamma.slope == -0.5);
  CHECK(c.run.pot.rho == 2.0);
  CHECK(c.run.pot.c0 == 0.5);
  CHECK(!c.run.pot.same_growth);
  CHECK(c.u0.kind == "fourier");
  CHECK(c.u0.mode_x == 2);
  CHECK(c.g.kind == "cosine");
  CHECK(c.g.amplitude == 3.0);
  CHECK(c.g_gamma.value == 0.7);
  CHECK(c.run.dt == 0.01);
  CHECK(c.run.t_end == 0.2);
  CHECK(c.run.newton_tol == 1e-9);
  CHECK(c.run.newton_max_iter == 30);
  CHECK(c.run.linear_tol == 1e-8);
  CHECK(c.run.splitting == Splitting::fully_implicit);
  CHECK(c.out_dir == "results");
  CHECK(c.snapshot_every == 5);
}

TEST_CASE("syntax problems raise ParseError") {
  auto expect_parse_error = [](const std::string& text) {
    TempFile f("cfg_bad_syntax.toml", text);
    CHECK_THROWS_AS(parse_config(f.path), ParseError);
  };
  expect_parse_error("[grid\nnx = 8\n");
  expect_parse_error("just some words\n");
  expect_parse_error("[time]\ndt =\n");
  expect_parse_error("[time]\ndt = 0.1\ndt = 0.2\n");
  expect_parse_error("[output]\ndirectory = \"unterminated\n");
  CHECK_THROWS_AS(parse_config("no_such_config.toml"), IoError);
}

TEST_CASE("range violations are all collected, with rule labels") {
  TempFile f("cfg_ranges.toml",
             "[physics]\n"
             "tau = -0.2\n"
             "kappa = 1.5\n"
             "eps = 0\n"
             "[potentials]\n"
             "rho = 0.5\n"
             "c0 = -1\n"
             "[time]\n"
             "dt = -0.01\n");
  try {
    parse_config(f.path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations.size() == 6);
    CHECK(mentions(e.violations, "physics.tau = -0.2"));
    CHECK(mentions(e.violations, "physics.kappa = 1.5"));
    CHECK(mentions(e.violations, "must lie in [0, 1]"));
    CHECK(mentions(e.violations, "physics.eps = 0"));
    CHECK(mentions(e.violations, "rho >= 1 (A2)"));
    CHECK(mentions(e.violations, "potentials.c0 = -1"));
    CHECK(mentions(e.violations, "time.dt = -0.01"));
    CHECK(std::string(e.what()).find("kappa") != std::string::npos);
  }
}

TEST_CASE("obstacle boundary with constant u0 = 1 fails the mean-interiority rule") {
  TempFile f("cfg_obstacle_mean.toml",
             "[potentials]\n"
             "preset = \"obstacle\"\n"
             "[data]\n"
             "u0.kind = \"constant\"\n"
             "u0.value = 1.0\n");
  try {
    parse_config(f.path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.violations, "(A4)"));
    CHECK(mentions(e.violations, "mean m0 = 1"));
  }

  // pointwise excursions beyond the domain radius are caught too
  TempFile f2("cfg_obstacle_point.toml",
              "[potentials]\n"
              "preset = \"obstacle\"\n"
              "[data]\n"
              "u0.kind = \"fourier\"\n"
              "u0.mean = 0.0\n"
              "u0.amplitude = 1.3\n");
  try {
    parse_config(f2.path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.violations, "outside the bulk graph domain"));
    CHECK(mentions(e.violations, "(A4)"));
  }
}

TEST_CASE("unknown keys, kind mismatches, and preset conflicts are reported") {
  TempFile f("cfg_unknown.toml",
             "[grid]\n"
             "nz = 7\n"
             "[data]\n"
             "u0.kind = \"constant\"\n"
             "u0.seed = 3\n"
             "g.kind = \"zero\"\n"
             "g.value = 1.0\n");
  try {
    parse_config(f.path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.violations, "grid.nz"));
    CHECK(mentions(e.violations, "unknown key"));
    CHECK(mentions(e.violations, "u0.seed: not a parameter of the constant"));
    CHECK(mentions(e.violations, "g.value: only the constant source"));
  }

  TempFile f2("cfg_preset_conflict.toml",
              "[potentials]\n"
              "preset = \"regular\"\n"
              "rho = 2.0\n");
  try {
    parse_config(f2.path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.violations, "cannot be combined with potentials.preset"));
  }

  TempFile f3("cfg_graph_params.toml",
              "[potentials]\n"
              "bulk.kind = \"obstacle\"\n"
              "bulk.scale = 2.0\n"
              "boundary.kind = \"cubic\"\n"
              "boundary.scale = -1.0\n");
  try {
    parse_config(f3.path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.violations, "obstacle graph takes no scale"));
    CHECK(mentions(e.violations, "positive coefficient (A1)"));
  }
}

TEST_CASE("presets expand to the standard pairs") {
  TempFile f("cfg_preset_log.toml", "[potentials]\npreset = \"logarithmic\"\n");
  AppConfig c = parse_config(f.path);
  CHECK(c.run.pot.bulk.kind == GraphKind::logarithmic);
  CHECK(c.run.pot.boundary.kind == GraphKind::logarithmic);
  CHECK(c.run.pot.pi.slope == -4.0);
  CHECK(c.run.pot.same_growth);
}

TEST_CASE("initial datum generators: formula, determinism, snapshot round-trip") {
  TempFile f("cfg_u0_fourier.toml",
             "[grid]\nnx = 8\nny = 6\n[data]\n"
             "u0.kind = \"fourier\"\nu0.mean = 0.2\nu0.amplitude = 0.3\n"
             "u0.mode_x = 1\nu0.mode_y = 2\n");
  AppConfig c = parse_config(f.path);
  SlabGrid g = c.make_grid();
  Field u0 = c.make_u0(g);
  const double pi = std::numbers::pi;
  for (int j = 0; j < g.ny; j += 2)
    for (int i = 0; i < g.nx; i += 3) {
      double want = 0.2 + 0.3 * std::cos(2.0 * pi * i * g.hx) * std::cos(2.0 * pi * j * g.hy);
      CHECK(u0.a[g.idx(i, j)] == doctest::Approx(want).epsilon(1e-14));
    }

  TempFile f2("cfg_u0_rand.toml",
              "[grid]\nnx = 8\nny = 6\n[data]\n"
              "u0.kind = \"random-smooth\"\nu0.mean = 0.1\nu0.amplitude = 0.4\n"
              "u0.cutoff = 3\nu0.seed = 42\n");
  AppConfig cr = parse_config(f2.path);
  Field a = cr.make_u0(g);
  Field b = cr.make_u0(g);
  for (size_t k = 0; k < a.a.size(); ++k) CHECK(a.a[k] == b.a[k]);
  cr.u0.seed = 43;
  Field other = cr.make_u0(g);
  double diff = 0.0;
  for (size_t k = 0; k < a.a.size(); ++k) diff = std::max(diff, std::fabs(a.a[k] - other.a[k]));
  CHECK(diff > 1e-6);

  write_field("cfg_u0_snap.field", g, a, 0.0);
  TempFile f3("cfg_u0_file.toml",
              "[grid]\nnx = 8\nny = 6\n[data]\nu0.kind = \"file\"\n"
              "u0.path = \"cfg_u0_snap.field\"\n");
  AppConfig cf = parse_config(f3.path);
  Field loaded = cf.make_u0(g);
  for (size_t k = 0; k < a.a.size(); ++k) CHECK(loaded.a[k] == a.a[k]);

  TempFile f4("cfg_u0_mismatch.toml",
              "[grid]\nnx = 12\nny = 6\n[data]\nu0.kind = \"file\"\n"
              "u0.path = \"cfg_u0_snap.field\"\n");
  CHECK_THROWS_AS(parse_config(f4.path), ValidationError);
  std::remove("cfg_u0_snap.field");
}

TEST_CASE("source assembly matches the declared shapes") {
  TempFile f("cfg_src.toml",
             "[grid]\nnx = 8\nny = 6\n[data]\n"
             "g.kind = \"cosine\"\ng.amplitude = 2.0\ng.mode = 1\n"
             "g_gamma.kind = \"constant\"\ng_gamma.value = 0.5\n");
  AppConfig c = parse_config(f.path);
  SlabGrid g = c.make_grid();
  auto src = c.make_source(g);
  REQUIRE(bool(src));
  SourceData s = src(0.3);
  const double pi = std::numbers::pi;
  for (int i = 0; i < g.nx; ++i) {
    double want = 2.0 * std::cos(2.0 * pi * i * g.hx);
    CHECK(s.g.a[g.idx(i, 3)] == doctest::Approx(want).epsilon(1e-14));
    CHECK(s.g_gamma.line[0][i] == 0.5);
    CHECK(s.g_gamma.line[1][i] == 0.5);
  }

  TempFile f2("cfg_src_zero.toml", "");
  AppConfig cz = parse_config(f2.path);
  CHECK(!bool(cz.make_source(g)));
}
