#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chslab/stepper.hpp"
#include "support.hpp"

using namespace chslab;

namespace {

RunConfig linear_config(double bulk_slope, double bnd_slope, double pi_s, double pig_s) {
  RunConfig cfg;
  cfg.pot.bulk = linear_graph(bulk_slope);
  cfg.pot.boundary = linear_graph(bnd_slope);
  cfg.pot.pi = {pi_s};
  cfg.pot.pi_gamma = {pig_s};
  cfg.pot.same_growth = true;
  return cfg;
}

}  // namespace

TEST_CASE("uniform steady state returns unchanged in one newton iteration") {
  SlabGrid g(16, 12, 1.0, 1.0);
  const double m0 = 0.3;
  RunConfig cfg;  // regular potential
  cfg.tau = 1.0;
  cfg.kappa = 1.0;
  cfg.eps = 0.1;
  SourceData steady = testsup::steady_source(g, cfg, m0);
  cfg.source = [steady](double) { return steady; };
  ImplicitStepper st(g, cfg);
  State s;
  s.u = Field(g.nx, g.ny, m0);
  s.mu = Field(g.nx, g.ny, 0.0);
  StepStats stats = st.step(s, cfg.dt);
  CHECK(stats.newton_iters == 1);
  CHECK(stats.residual <= 1e-12);
  CHECK_FALSE(stats.halved);
  for (double v : s.u.a) CHECK(v == doctest::Approx(m0).epsilon(1e-13));
  for (double v : s.mu.a) CHECK(std::fabs(v) <= 1e-12);
  CHECK(mean(g, s.u) == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("zero state with zero data has zero residual") {
  SlabGrid g(8, 8, 1.0, 1.0);
  RunConfig cfg;
  cfg.tau = 0.0;
  cfg.kappa = 0.0;
  ImplicitStepper st(g, cfg);
  State s;
  s.u = Field(g.nx, g.ny, 0.0);
  s.mu = Field(g.nx, g.ny, 0.0);
  auto R = st.residual(s, s.u, s.mu, st.eval_source(0.0), cfg.dt);
  CHECK(R.lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("linear-graph stepper matches the dense modal reduction") {
  SlabGrid g(16, 9, 1.5, 1.0);
  for (double tau : {0.0, 1.0}) {
    for (double kappa : {0.0, 0.7}) {
      modal::Reduction red;
      red.g = g;
      red.k = 3;
      red.tau = tau;
      red.kappa = kappa;
      red.eps = 0.1;
      red.dt = 0.02;
      red.bs = 1.0;
      red.gs = 0.8;
      red.ps = -1.0;
      red.pgs = -0.5;

      RunConfig cfg = linear_config(red.bs, red.gs, red.ps, red.pgs);
      cfg.tau = tau;
      cfg.kappa = kappa;
      cfg.eps = red.eps;
      cfg.dt = red.dt;
      ImplicitStepper st(g, cfg);

      Eigen::VectorXd U = modal::profile(g, 1.0, 1.0, -0.3);
      State s;
      s.u = modal::field_from_mode(g, red.k, U);
      s.mu = Field(g.nx, g.ny, 0.0);
      for (int k = 0; k < 10; ++k) {
        auto [Un, Mn] = red.step(U);
        U = Un;
        StepStats stats = st.step(s, cfg.dt);
        CHECK(stats.newton_iters == 1);  // affine system
        CHECK(testsup::max_abs_diff(s.u, modal::field_from_mode(g, red.k, U)) <= 1e-10);
        CHECK(testsup::max_abs_diff(s.mu, modal::field_from_mode(g, red.k, Mn)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("mass is conserved step by step") {
  SlabGrid g(24, 24, 1.0, 1.0);
  RunConfig cfg;  // regular potential
  cfg.tau = 1.0;
  cfg.kappa = 1.0;
  cfg.eps = 0.1;
  cfg.dt = 0.005;
  ImplicitStepper st(g, cfg);
  State s;
  s.u = testsup::smooth_field(g, 0.1, 0.4);
  s.mu = Field(g.nx, g.ny, 0.0);
  const double m0 = mean(g, s.u);
  st.step(s, cfg.dt);
  CHECK(std::fabs(mean(g, s.u) - m0) <= 1e-11);
  for (int k = 0; k < 19; ++k) st.step(s, cfg.dt);
  CHECK(std::fabs(mean(g, s.u) - m0) <= 1e-10);
}

TEST_CASE("jacobian matches finite differences at second order") {
  SlabGrid g(8, 6, 1.0, 1.0);
  std::mt19937_64 rng(9001);
  std::uniform_real_distribution<double> dist(-0.75, 0.75);
  PotentialPair pots[2] = {regular_pair(), logarithmic_pair()};
  for (const auto& pot : pots) {
    RunConfig cfg;
    cfg.pot = pot;
    cfg.tau = 1.0;
    cfg.kappa = 0.5;
    cfg.eps = 0.1;
    cfg.dt = 0.01;
    ImplicitStepper st(g, cfg);
    for (int trial = 0; trial < 10; ++trial) {
      State old;
      old.u = Field(g.nx, g.ny);
      old.mu = Field(g.nx, g.ny);
      Field u(g.nx, g.ny), mu(g.nx, g.ny), du(g.nx, g.ny), dmu(g.nx, g.ny);
      for (size_t p = 0; p < u.a.size(); ++p) {
        old.u.a[p] = dist(rng);
        old.mu.a[p] = dist(rng);
        u.a[p] = dist(rng);
        mu.a[p] = dist(rng);
        du.a[p] = dist(rng);
        dmu.a[p] = dist(rng);
      }
      SourceData src = st.eval_source(0.0);
      Eigen::VectorXd R0 = st.residual(old, u, mu, src, cfg.dt);
      Eigen::SparseMatrix<double> J = st.jacobian(u, cfg.dt);
      Eigen::VectorXd d(2 * g.n());
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          d[2 * g.idx(i, j)] = du(i, j);
          d[2 * g.idx(i, j) + 1] = dmu(i, j);
        }
      Eigen::VectorXd Jd = J * d;
      std::vector<double> hs = {1e-2, 1e-3, 1e-4, 1e-5};
      std::vector<double> mismatch;
      for (double h : hs) {
        Field uh = u, muh = mu;
        for (size_t p = 0; p < u.a.size(); ++p) {
          uh.a[p] += h * du.a[p];
          muh.a[p] += h * dmu.a[p];
        }
        Eigen::VectorXd Rh = st.residual(old, uh, muh, src, cfg.dt);
        mismatch.push_back((Rh - R0 - h * Jd).lpNorm<Eigen::Infinity>());
      }
      // least-squares slope of log(mismatch) vs log(h)
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = int(hs.size());
      for (int q = 0; q < n; ++q) {
        double lx = std::log(hs[q]), ly = std::log(std::max(mismatch[q], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
      }
      double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      CHECK(slope >= 1.9);
    }
  }
}

TEST_CASE("obstacle jacobian and residual reduce to the unconstrained ones inside") {
  SlabGrid g(8, 6, 1.0, 1.0);
  RunConfig obst;
  obst.pot = obstacle_pair();
  obst.eps = 0.1;
  RunConfig none = obst;
  none.pot.bulk = linear_graph(0.0);
  none.pot.boundary = linear_graph(0.0);
  ImplicitStepper st1(g, obst), st2(g, none);
  std::mt19937_64 rng(9002);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  State old;
  old.u = Field(g.nx, g.ny);
  old.mu = Field(g.nx, g.ny);
  Field u(g.nx, g.ny), mu(g.nx, g.ny);
  for (size_t p = 0; p < u.a.size(); ++p) {
    old.u.a[p] = dist(rng);
    old.mu.a[p] = dist(rng);
    u.a[p] = dist(rng);  // strictly inside [-1,1]
    mu.a[p] = dist(rng);
  }
  Eigen::SparseMatrix<double> J1 = st1.jacobian(u, obst.dt);
  Eigen::SparseMatrix<double> J2 = st2.jacobian(u, obst.dt);
  CHECK(Eigen::MatrixXd(J1 - J2).lpNorm<Eigen::Infinity>() == 0.0);
  SourceData src = st1.eval_source(0.0);
  Eigen::VectorXd R1 = st1.residual(old, u, mu, src, obst.dt);
  Eigen::VectorXd R2 = st2.residual(old, u, mu, src, obst.dt);
  CHECK((R1 - R2).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("run performs round(t_end/dt) steps with exact time stamps") {
  SlabGrid g(8, 6, 1.0, 1.0);
  RunConfig cfg = linear_config(1.0, 1.0, 0.0, 0.0);
  cfg.dt = 0.01;
  cfg.t_end = 0.03;
  Field u0 = testsup::smooth_field(g, 0.0, 0.2);
  int calls = 0;
  auto sum = run(g, cfg, u0, [&](const State& prev, const State& next, const StepStats&) {
    ++calls;
    CHECK(next.t == calls * cfg.dt);
    CHECK(prev.t == (calls - 1) * cfg.dt);
  });
  CHECK(calls == 3);
  CHECK(sum.stats.size() == 3);
  CHECK(sum.last.t == 3 * cfg.dt);

  cfg.t_end = 0.0251;
  CHECK_THROWS_AS(run(g, cfg, u0), DomainError);
}

TEST_CASE("solution depends continuously on the viscosity parameter") {
  SlabGrid g(16, 12, 1.0, 1.0);
  RunConfig cfg;  // regular potential
  cfg.kappa = 1.0;
  cfg.eps = 0.1;
  cfg.dt = 0.005;
  cfg.t_end = 0.05;
  Field u0 = testsup::smooth_field(g, 0.1, 0.3);
  cfg.tau = 0.0;
  auto r0 = run(g, cfg, u0);
  cfg.tau = 1e-8;
  auto r1 = run(g, cfg, u0);
  CHECK(testsup::max_abs_diff(r0.last.u, r1.last.u) <= 1e-5);
}

TEST_CASE("newton divergence is reported after the halving retry") {
  SlabGrid g(8, 6, 1.0, 1.0);
  RunConfig cfg;  // regular potential: cubic nonlinearity
  cfg.newton_max_iter = 1;
  cfg.dt = 1.0;
  cfg.t_end = 1.0;
  Field u0 = testsup::smooth_field(g, 0.0, 2.5);
  CHECK_THROWS_AS(run(g, cfg, u0), NewtonDivergence);
}
