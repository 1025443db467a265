#include "chslab/stepper.hpp"

#include <cmath>
#include <sstream>

namespace chslab {

Field yosida_field(const MonotoneGraph& g, double eps, const Field& z) {
  Field out(z.nx, z.ny);
  for (size_t p = 0; p < z.a.size(); ++p) out.a[p] = yosida(g, eps, z.a[p]);
  return out;
}

BoundaryField yosida_boundary(const MonotoneGraph& g, double eps, const BoundaryField& b) {
  BoundaryField out(b.nx());
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < b.nx(); ++i) out.line[l][i] = yosida(g, eps, b.line[l][i]);
  return out;
}

ImplicitStepper::ImplicitStepper(const SlabGrid& grid, const RunConfig& cfg)
    : grid_(grid), cfg_(cfg) {
  if (!(cfg.eps > 0.0)) throw DomainError("stepper: eps must be positive");
  if (cfg.newton_max_iter < 1) throw DomainError("stepper: newton_max_iter must be >= 1");
  constant_jacobian_ = cfg.pot.bulk.kind == GraphKind::linear &&
                       cfg.pot.boundary.kind == GraphKind::linear;
}

SourceData ImplicitStepper::eval_source(double t) const {
  if (cfg_.source) return cfg_.source(t);
  SourceData s;
  s.g = Field(grid_.nx, grid_.ny, 0.0);
  s.g_gamma = BoundaryField(grid_.nx, 0.0);
  return s;
}

Eigen::VectorXd ImplicitStepper::residual(const State& s_old, const Field& u_new,
                                          const Field& mu_new, const SourceData& src,
                                          double dt) const {
  const SlabGrid& g = grid_;
  const double c = 0.5 * g.hy;
  const double tau = cfg_.tau, kappa = cfg_.kappa, eps = cfg_.eps;
  const PotentialPair& pot = cfg_.pot;
  const Field& uo = s_old.u;
  const Field& upi = (cfg_.splitting == Splitting::implicit_convex) ? s_old.u : u_new;

  Field lap_mu = laplacian_neumann(g, mu_new);
  Field lap_u = laplacian_bulk(g, u_new);
  Eigen::VectorXd R(2 * g.n());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int p = g.idx(i, j);
      const double du = (u_new(i, j) - uo(i, j)) / dt;
      R[2 * p] = du - lap_mu(i, j);
      if (j > 0 && j < g.ny - 1) {
        R[2 * p + 1] = mu_new(i, j) - tau * du + lap_u(i, j) -
                       yosida(pot.bulk, eps, u_new(i, j)) - pi_eval(pot.pi, upi(i, j)) +
                       src.g(i, j);
      } else {
        const int side = (j == 0) ? 0 : 1;
        const int jn = (j == 0) ? 1 : g.ny - 2;
        const double dxx =
            (u_new(g.ip(i), j) - 2.0 * u_new(i, j) + u_new(g.im(i), j)) / (g.hx * g.hx);
        R[2 * p + 1] = (1.0 + tau * c) * du + (u_new(i, j) - u_new(i, jn)) / g.hy -
                       (c + kappa) * dxx + yosida(pot.boundary, eps, u_new(i, j)) +
                       c * yosida(pot.bulk, eps, u_new(i, j)) +
                       pi_eval(pot.pi_gamma, upi(i, j)) + c * pi_eval(pot.pi, upi(i, j)) -
                       src.g_gamma.line[side][i] - c * mu_new(i, j) - c * src.g(i, j);
      }
    }
  }
  return R;
}

Eigen::SparseMatrix<double> ImplicitStepper::jacobian(const Field& u_new, double dt) const {
  const SlabGrid& g = grid_;
  const double c = 0.5 * g.hy;
  const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
  const double tau = cfg_.tau, kappa = cfg_.kappa, eps = cfg_.eps;
  const bool full = cfg_.splitting == Splitting::fully_implicit;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(13) * g.n());
  auto U = [&](int i, int j) { return 2 * g.idx(i, j); };
  auto M = [&](int i, int j) { return 2 * g.idx(i, j) + 1; };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int rm = U(i, j);  // mass row
      trip.emplace_back(rm, U(i, j), 1.0 / dt);
      trip.emplace_back(rm, M(i, j), 2.0 * ax + 2.0 * ay);
      trip.emplace_back(rm, M(g.ip(i), j), -ax);
      trip.emplace_back(rm, M(g.im(i), j), -ax);
      if (j == 0) {
        trip.emplace_back(rm, M(i, 1), -2.0 * ay);
      } else if (j == g.ny - 1) {
        trip.emplace_back(rm, M(i, g.ny - 2), -2.0 * ay);
      } else {
        trip.emplace_back(rm, M(i, j - 1), -ay);
        trip.emplace_back(rm, M(i, j + 1), -ay);
      }
      const int rq = M(i, j);  // chemical / boundary row
      if (j > 0 && j < g.ny - 1) {
        trip.emplace_back(rq, M(i, j), 1.0);
        double diag = -tau / dt - 2.0 * ax - 2.0 * ay -
                      yosida_prime(cfg_.pot.bulk, eps, u_new(i, j));
        if (full) diag -= cfg_.pot.pi.slope;
        trip.emplace_back(rq, U(i, j), diag);
        trip.emplace_back(rq, U(g.ip(i), j), ax);
        trip.emplace_back(rq, U(g.im(i), j), ax);
        trip.emplace_back(rq, U(i, j - 1), ay);
        trip.emplace_back(rq, U(i, j + 1), ay);
      } else {
        const int jn = (j == 0) ? 1 : g.ny - 2;
        trip.emplace_back(rq, M(i, j), -c);
        double diag = (1.0 + tau * c) / dt + 1.0 / g.hy + 2.0 * (c + kappa) * ax +
                      yosida_prime(cfg_.pot.boundary, eps, u_new(i, j)) +
                      c * yosida_prime(cfg_.pot.bulk, eps, u_new(i, j));
        if (full) diag += cfg_.pot.pi_gamma.slope + c * cfg_.pot.pi.slope;
        trip.emplace_back(rq, U(i, j), diag);
        trip.emplace_back(rq, U(g.ip(i), j), -(c + kappa) * ax);
        trip.emplace_back(rq, U(g.im(i), j), -(c + kappa) * ax);
        trip.emplace_back(rq, U(i, jn), -1.0 / g.hy);
      }
    }
  }
  Eigen::SparseMatrix<double> J(2 * g.n(), 2 * g.n());
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

StepStats ImplicitStepper::newton(State& s, const SourceData& src, double dt) {
  Field u = s.u, mu = s.mu;
  Eigen::VectorXd R = residual(s, u, mu, src, dt);
  StepStats st;
  for (int it = 1; it <= cfg_.newton_max_iter; ++it) {
    st.newton_iters = it;
    const bool reuse = constant_jacobian_ && pattern_ready_ && cached_dt_ == dt;
    if (!reuse) {
      Eigen::SparseMatrix<double> J = jacobian(u, dt);
      if (!pattern_ready_) {
        lu_.analyzePattern(J);
        pattern_ready_ = true;
      }
      lu_.factorize(J);
      if (lu_.info() != Eigen::Success)
        throw SolverError("newton: sparse LU factorization failed");
      cached_dt_ = dt;
    }
    Eigen::VectorXd delta = lu_.solve(-R);
    if (lu_.info() != Eigen::Success) throw SolverError("newton: sparse LU solve failed");
    for (int j = 0; j < grid_.ny; ++j) {
      for (int i = 0; i < grid_.nx; ++i) {
        const int p = grid_.idx(i, j);
        u(i, j) += delta[2 * p];
        mu(i, j) += delta[2 * p + 1];
      }
    }
    R = residual(s, u, mu, src, dt);
    st.residual = R.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(st.residual)) break;
    if (st.residual <= cfg_.newton_tol) {
      s.u = std::move(u);
      s.mu = std::move(mu);
      s.t += dt;
      return st;
    }
  }
  std::ostringstream os;
  os << "newton: no convergence after " << st.newton_iters << " iterations (residual "
     << st.residual << ", step toward t=" << s.t + dt << ")";
  throw NewtonDivergence(os.str());
}

StepStats ImplicitStepper::step(State& s, double dt) {
  const State backup = s;
  try {
    return newton(s, eval_source(s.t + dt), dt);
  } catch (const NewtonDivergence&) {
    s = backup;
  }
  // one retry as two half steps; a failure here propagates
  const double h = 0.5 * dt;
  StepStats a = newton(s, eval_source(s.t + h), h);
  StepStats b = newton(s, eval_source(s.t + h), h);
  StepStats st;
  st.newton_iters = a.newton_iters + b.newton_iters;
  st.residual = b.residual;
  st.halved = true;
  return st;
}

RunSummary run(const SlabGrid& grid, const RunConfig& cfg, const Field& u0,
               const StepCallback& on_step) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
    throw DomainError("run: dt and t_end must be positive");
  const long K = std::lround(cfg.t_end / cfg.dt);
  if (K < 1 || std::fabs(double(K) * cfg.dt - cfg.t_end) > 1e-8 * std::max(cfg.dt, cfg.t_end))
    throw DomainError("run: t_end must be an integer multiple of dt");
  ImplicitStepper stepper(grid, cfg);
  RunSummary sum;
  State s;
  s.t = 0.0;
  s.u = u0;
  s.mu = Field(grid.nx, grid.ny, 0.0);
  sum.stats.reserve(size_t(K));
  for (long k = 0; k < K; ++k) {
    State prev = s;
    try {
      sum.stats.push_back(stepper.step(s, cfg.dt));
    } catch (const NewtonDivergence& e) {
      std::ostringstream os;
      os << e.what() << " [failing step " << k + 1 << " of " << K << "]";
      throw NewtonDivergence(os.str());
    }
    s.t = double(k + 1) * cfg.dt;  // assign, not accumulate
    if (on_step) on_step(prev, s, sum.stats.back());
  }
  sum.last = std::move(s);
  return sum;
}

}  // namespace chslab
