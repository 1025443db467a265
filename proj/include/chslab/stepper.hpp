#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <functional>
#include <vector>

#include "chslab/graphs.hpp"
#include "chslab/grid.hpp"

namespace chslab {

// Treatment of the Lipschitz perturbation pi in the implicit step. The
// monotone part beta_eps is always implicit; `implicit_convex` takes pi at the
// old state (for linear pi with nonpositive slope this makes every step
// dissipate the free energy unconditionally), `fully_implicit` takes it at the
// new state.
enum class Splitting { implicit_convex, fully_implicit };

struct SourceData {
  Field g;              // bulk source
  BoundaryField g_gamma;  // boundary source
};

struct State {
  double t = 0.0;
  Field u;
  Field mu;
};

// Pointwise Yosida evaluation on fields.
Field yosida_field(const MonotoneGraph& g, double eps, const Field& z);
BoundaryField yosida_boundary(const MonotoneGraph& g, double eps, const BoundaryField& b);

// Trace rows of the order parameter (the boundary unknowns coincide with the
// boundary rows of u by construction).
inline BoundaryField u_gamma(const SlabGrid& g, const State& s) { return trace(g, s.u); }

struct RunConfig {
  double tau = 1.0;    // viscosity in [0,1]
  double kappa = 1.0;  // surface diffusion in [0,1]
  double eps = 0.1;    // regularization parameter in (0,1]
  double dt = 0.005;
  double t_end = 0.1;
  PotentialPair pot = regular_pair();
  Splitting splitting = Splitting::implicit_convex;
  double newton_tol = 1e-11;  // l-infinity of the stacked residual
  int newton_max_iter = 50;
  double linear_tol = 1e-10;  // tolerance of iterative norm solves in diagnostics
  // Sources sampled at the implicit time level t_{k+1}; empty means zero data.
  std::function<SourceData(double t)> source;
};

struct StepStats {
  int newton_iters = 0;   // number of linear solves performed
  double residual = 0.0;  // l-infinity of the final residual
  bool halved = false;    // step was retried as two half steps
};

// Backward-Euler step of the coupled bulk/boundary system as one monolithic
// nonlinear system in the 2*nx*ny interleaved unknowns (u_p, mu_p). Rows per
// node, with du = (u+ - u)/dt, c = hy/2:
//   mass (all nodes):        du - lap_N mu+ = 0
//   chemical (interior):     mu+ - tau*du + lap u+ - beta_eps(u+) - pi(u°) + g = 0
//   boundary (j=0, ny-1):    (1 + tau*c)*du + (u0+ - u1+)/hy - (c+kappa)*Dxx u0+
//                            + betaG_eps(u0+) + c*beta_eps(u0+) + piG(u0°) + c*pi(u0°)
//                            - gG - c*mu0+ - c*g0 = 0
// The boundary row couples the boundary evolution law with the half-cell
// (mass-lumped) weak form of the chemical-potential equation; this choice is
// what makes the discrete energy identity exact (see diagnostics).
class ImplicitStepper {
 public:
  ImplicitStepper(const SlabGrid& grid, const RunConfig& cfg);

  // Advances s by dt (Newton + sparse LU). On Newton divergence the step is
  // retried once as two half steps; failure of the retry throws
  // NewtonDivergence. Always performs at least one linear solve.
  StepStats step(State& s, double dt);

  // Stacked residual at (u_new, mu_new) given the previous state; exposed for
  // verification.
  Eigen::VectorXd residual(const State& s_old, const Field& u_new, const Field& mu_new,
                           const SourceData& src, double dt) const;

  // Jacobian of the residual with respect to the interleaved unknowns; for the
  // obstacle graph the a.e. derivative of the clamp is used.
  Eigen::SparseMatrix<double> jacobian(const Field& u_new, double dt) const;

  SourceData eval_source(double t) const;

  const SlabGrid& grid() const { return grid_; }
  const RunConfig& config() const { return cfg_; }

 private:
  StepStats newton(State& s, const SourceData& src, double dt);

  SlabGrid grid_;
  RunConfig cfg_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool pattern_ready_ = false;
  bool constant_jacobian_ = false;  // both graphs linear: factorization reusable
  double cached_dt_ = -1.0;
};

struct RunSummary {
  State last;
  std::vector<StepStats> stats;
};

using StepCallback = std::function<void(const State& prev, const State& next, const StepStats&)>;

// Integrates from t=0 to t_end in exactly round(t_end/dt) steps of size dt
// (t_end must be an integer multiple of dt); time stamps are assigned as k*dt.
// The initial chemical potential is set to zero. The callback fires after
// every accepted step.
RunSummary run(const SlabGrid& grid, const RunConfig& cfg, const Field& u0,
               const StepCallback& on_step = {});

}  // namespace chslab
