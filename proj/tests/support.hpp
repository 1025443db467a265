#pragma once

// Shared test utilities. `modal::Reduction` is an independent oracle for the
// coupled scheme with linear graphs: for initial data of the form
// u(i,j) = U_j cos(2 pi k i / nx), every operator in the scheme preserves the
// cosine x-mode (0 < k < nx/2), so the full 2*nx*ny system reduces exactly to
// a dense (2*ny)-dimensional linear system per step, assembled here from
// scratch and solved with a dense LU — sharing no code path with the sparse
// stepper under test.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "chslab/grid.hpp"
#include "chslab/stepper.hpp"

namespace modal {

struct Reduction {
  chslab::SlabGrid g;
  int k = 1;           // x-mode index, 0 < k < nx/2
  double tau = 1.0;
  double kappa = 1.0;
  double eps = 0.1;
  double dt = 0.01;
  double bs = 1.0;     // bulk linear-graph slope
  double gs = 1.0;     // boundary linear-graph slope
  double ps = 0.0;     // bulk perturbation slope
  double pgs = 0.0;    // boundary perturbation slope
  bool pi_implicit = false;

  double sx() const {
    double th = 2.0 * std::numbers::pi * k / g.nx;
    return (2.0 - 2.0 * std::cos(th)) / (g.hx * g.hx);
  }
  double byos() const { return bs / (1.0 + eps * bs); }
  double gyos() const { return gs / (1.0 + eps * gs); }

  // One backward-Euler step; returns the new (U, M) profile pair.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> step(const Eigen::VectorXd& U) const {
    const int ny = g.ny;
    const double hy = g.hy, c = 0.5 * hy, ay = 1.0 / (hy * hy), s = sx();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * ny, 2 * ny);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * ny);
    for (int j = 0; j < ny; ++j) {
      // mass row: U+/dt + (s - Dy) M+ = U/dt
      A(j, j) = 1.0 / dt;
      A(j, ny + j) = s + 2.0 * ay;
      if (j == 0)
        A(j, ny + 1) -= 2.0 * ay;
      else if (j == ny - 1)
        A(j, ny + ny - 2) -= 2.0 * ay;
      else {
        A(j, ny + j - 1) -= ay;
        A(j, ny + j + 1) -= ay;
      }
      rhs(j) = U(j) / dt;
      const int r = ny + j;
      if (j > 0 && j < ny - 1) {
        A(r, ny + j) = 1.0;
        A(r, j) = -tau / dt - 2.0 * ay - s - byos();
        A(r, j - 1) += ay;
        A(r, j + 1) += ay;
        rhs(r) = -tau * U(j) / dt;
        if (pi_implicit)
          A(r, j) -= ps;
        else
          rhs(r) += ps * U(j);
      } else {
        const int jn = (j == 0) ? 1 : ny - 2;
        A(r, j) = (1.0 + tau * c) / dt + 1.0 / hy + (c + kappa) * s + gyos() + c * byos();
        A(r, jn) -= 1.0 / hy;
        A(r, ny + j) = -c;
        rhs(r) = (1.0 + tau * c) * U(j) / dt;
        if (pi_implicit)
          A(r, j) += pgs + c * ps;
        else
          rhs(r) -= (pgs + c * ps) * U(j);
      }
    }
    Eigen::VectorXd z = A.partialPivLu().solve(rhs);
    return {z.head(ny), z.tail(ny)};
  }

  // Free energy of the mode profile (all quadratic for linear graphs):
  // (Lx/2) [ (s + byos + ps)/2 * sum wy U^2 + 1/2 sum (dU)^2/hy
  //          + (kappa*s + gyos + pgs)/2 * (U_0^2 + U_last^2) ].
  double energy(const Eigen::VectorXd& U) const {
    const int ny = g.ny;
    double swy = 0.0, sdy = 0.0;
    for (int j = 0; j < ny; ++j) swy += g.wy(j) * U(j) * U(j);
    for (int j = 0; j + 1 < ny; ++j) {
      double d = U(j + 1) - U(j);
      sdy += d * d / g.hy;
    }
    double bnd = U(0) * U(0) + U(ny - 1) * U(ny - 1);
    return 0.5 * (0.5 * g.Lx) *
           ((sx() + byos() + ps) * swy + sdy + (kappa * sx() + gyos() + pgs) * bnd);
  }

  // D = |dU/dt|_{Vstar}^2 + tau |dU/dt|_H^2 + |dU_Gamma/dt|_{H_Gamma}^2 for the mode.
  double dissipation(const Eigen::VectorXd& Uold, const Eigen::VectorXd& Unew) const {
    const int ny = g.ny;
    const double ay = 1.0 / (g.hy * g.hy), s = sx();
    Eigen::VectorXd dU = (Unew - Uold) / dt;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ny, ny);  // modal -lap_N
    for (int j = 0; j < ny; ++j) {
      B(j, j) = s + 2.0 * ay;
      if (j == 0)
        B(j, 1) -= 2.0 * ay;
      else if (j == ny - 1)
        B(j, ny - 2) -= 2.0 * ay;
      else {
        B(j, j - 1) -= ay;
        B(j, j + 1) -= ay;
      }
    }
    Eigen::VectorXd W = B.partialPivLu().solve(dU);
    double swy = 0.0, sdy = 0.0, l2 = 0.0;
    for (int j = 0; j < ny; ++j) {
      swy += g.wy(j) * W(j) * W(j);
      l2 += g.wy(j) * dU(j) * dU(j);
    }
    for (int j = 0; j + 1 < ny; ++j) {
      double d = W(j + 1) - W(j);
      sdy += d * d / g.hy;
    }
    double vstar2 = (0.5 * g.Lx) * (s * swy + sdy);
    double bnd = dU(0) * dU(0) + dU(ny - 1) * dU(ny - 1);
    return vstar2 + tau * (0.5 * g.Lx) * l2 + (0.5 * g.Lx) * bnd;
  }
};

inline chslab::Field field_from_mode(const chslab::SlabGrid& g, int k,
                                     const Eigen::VectorXd& U) {
  chslab::Field f(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f(i, j) = U(j) * std::cos(2.0 * std::numbers::pi * k * i / g.nx);
  return f;
}

inline Eigen::VectorXd profile(const chslab::SlabGrid& g, double a, double b, double c) {
  Eigen::VectorXd U(g.ny);
  for (int j = 0; j < g.ny; ++j) {
    double y = g.y(j);
    U(j) = a + b * y + c * y * y;
  }
  return U;
}

}  // namespace modal

namespace testsup {

// Smooth deterministic field with prescribed mean (x-modes integrate to zero).
inline chslab::Field smooth_field(const chslab::SlabGrid& g, double mean_value,
                                  double amplitude) {
  chslab::Field f(g.nx, g.ny);
  const double pi = std::numbers::pi;
  for (int j = 0; j < g.ny; ++j) {
    double y = g.y(j) / g.Ly;
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x(i) / g.Lx;
      f(i, j) = mean_value +
                amplitude * (std::cos(2.0 * pi * x) * (1.0 + 0.5 * std::cos(pi * y)) +
                             0.4 * std::cos(4.0 * pi * x) * std::sin(pi * y));
    }
  }
  return f;
}

inline double max_abs_diff(const chslab::Field& a, const chslab::Field& b) {
  double m = 0.0;
  for (size_t p = 0; p < a.a.size(); ++p) m = std::max(m, std::fabs(a.a[p] - b.a[p]));
  return m;
}

// Steady compatible sources for a constant state m0: g = beta_eps(m0) + pi(m0),
// g_Gamma = betaG_eps(m0) + piG(m0).
inline chslab::SourceData steady_source(const chslab::SlabGrid& g,
                                        const chslab::RunConfig& cfg, double m0) {
  chslab::SourceData s;
  double gv = chslab::yosida(cfg.pot.bulk, cfg.eps, m0) + chslab::pi_eval(cfg.pot.pi, m0);
  double gb =
      chslab::yosida(cfg.pot.boundary, cfg.eps, m0) + chslab::pi_eval(cfg.pot.pi_gamma, m0);
  s.g = chslab::Field(g.nx, g.ny, gv);
  s.g_gamma = chslab::BoundaryField(g.nx, gb);
  return s;
}

}  // namespace testsup
