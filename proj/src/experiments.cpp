#include "chslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "chslab/errors.hpp"

namespace chslab {

namespace {

SourceData zero_data(const SlabGrid& g) {
  SourceData s;
  s.g = make_field(g);
  s.g_gamma.line[0].assign(g.nx, 0.0);
  s.g_gamma.line[1].assign(g.nx, 0.0);
  return s;
}

SourceData eval_or_zero(const SlabGrid& g, const std::function<SourceData(double)>& f,
                        double t) {
  return f ? f(t) : zero_data(g);
}

// Least-squares slope of log(y) against log(x), skipping nonpositive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

void check_sweep_params(const std::vector<double>& params, bool positive_only,
                        const char* what) {
  if (params.size() < 3)
    throw DomainError(std::string(what) + ": need at least 3 parameter values");
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (params[j] <= 0.0 || params[j] > 1.0)
      throw DomainError(std::string(what) + ": values must lie in (0,1]");
    if (j > 0 && !(params[j] < params[j - 1]))
      throw DomainError(std::string(what) + ": values must be strictly decreasing");
  }
  (void)positive_only;
}

// Runs work(0..n-1) on up to `threads` workers; the first failure is rethrown
// (in parameter order) after all workers finish.
void run_points(int threads, int n, const std::function<void(int)>& work) {
  threads = std::max(1, std::min(threads, n));
  std::vector<std::exception_ptr> errors(n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
          try {
            work(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (std::thread& th : pool) th.join();
  }
  for (int i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

double xi_gamma_distance(const SlabGrid& g, const RunConfig& cfg_a, const TrajectoryResult& a,
                         const RunConfig& cfg_b, const TrajectoryResult& b, double dt) {
  double sum = 0.0;
  for (std::size_t k = 1; k < a.states.size(); ++k) {
    BoundaryField xa = yosida_boundary(cfg_a.pot.boundary, cfg_a.eps, trace(g, a.states[k].u));
    BoundaryField xb = yosida_boundary(cfg_b.pot.boundary, cfg_b.eps, trace(g, b.states[k].u));
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < g.nx; ++i) xa.line[l][i] -= xb.line[l][i];
    double d = l2_boundary(g, xa);
    sum += dt * d * d;
  }
  return std::sqrt(sum);
}

void fill_entries(const SlabGrid& g, SweepResult& r, double dt) {
  for (std::size_t j = 0; j + 1 < r.runs.size(); ++j)
    r.entries[j].d_pairwise = trajectory_distance(g, r.runs[j], r.runs[j + 1], dt).c_h;
  for (std::size_t j = 0; j < r.runs.size(); ++j) {
    r.entries[j].param = r.params[j];
    r.entries[j].monitor = r.runs[j].monitor;
  }
}

}  // namespace

TrajectoryResult simulate(const SlabGrid& g, const RunConfig& cfg, const Field& u0) {
  TrajectoryResult out;
  State init;
  init.t = 0.0;
  init.u = u0;
  init.mu = make_field(g);
  out.states.push_back(init);
  out.records.push_back(
      make_record(g, cfg, eval_or_zero(g, cfg.source, 0.0), nullptr, init));
  run(g, cfg, u0, [&](const State& prev, const State& next, const StepStats& st) {
    SourceData src = eval_or_zero(g, cfg.source, next.t);
    out.records.push_back(make_record(g, cfg, src, &prev, next));
    if (!st.halved) {
      double gap = mu_mean_gap(g, prev, next, cfg, src);
      if (gap < -1e-10)
        throw SolverError("mean-of-mu bound violated at t=" + std::to_string(next.t) +
                          " (gap " + std::to_string(gap) + ")");
    }
    out.states.push_back(next);
  });
  out.monitor = estimate_monitor(out.records, cfg.dt, g.area());
  return out;
}

TrajectoryDistance trajectory_distance(const SlabGrid& g, const TrajectoryResult& a,
                                       const TrajectoryResult& b, double dt) {
  if (a.states.size() != b.states.size())
    throw DomainError("trajectory_distance: step ladders differ");
  TrajectoryDistance d;
  double sum_v = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    Field diff = a.states[k].u;
    for (int p = 0; p < g.n(); ++p) diff.a[p] -= b.states[k].u.a[p];
    d.c_h = std::max(d.c_h, l2_bulk(g, diff));
    d.c_hgamma = std::max(d.c_hgamma, l2_boundary(g, trace(g, diff)));
    if (k > 0) {
      double hv = h1_norm(g, diff);
      sum_v += dt * hv * hv;
    }
  }
  d.l2_v = std::sqrt(sum_v);
  return d;
}

SweepResult kappa_sweep(const SlabGrid& g, const RunConfig& base,
                        const std::vector<double>& kappas, const Field& u0, int threads) {
  check_sweep_params(kappas, true, "kappa_sweep");
  SweepResult r;
  r.params = kappas;
  r.runs.resize(kappas.size());
  r.entries.resize(kappas.size());
  r.has_reference = true;

  const int n = int(kappas.size()) + 1;  // last point is the kappa = 0 reference
  run_points(threads, n, [&](int i) {
    RunConfig cfg = base;
    cfg.kappa = (i < int(kappas.size())) ? kappas[i] : 0.0;
    try {
      TrajectoryResult t = simulate(g, cfg, u0);
      t.param = cfg.kappa;
      if (i < int(kappas.size()))
        r.runs[i] = std::move(t);
      else
        r.reference = std::move(t);
    } catch (const std::exception& e) {
      throw SolverError("kappa=" + std::to_string(cfg.kappa) + ": " + e.what());
    }
  });

  fill_entries(g, r, base.dt);
  for (std::size_t j = 0; j < r.runs.size(); ++j) {
    TrajectoryDistance d = trajectory_distance(g, r.runs[j], r.reference, base.dt);
    r.entries[j].d_to_ref = d.c_h;
    r.entries[j].d_to_ref_l2v = d.l2_v;
    r.entries[j].d_to_ref_bnd = d.c_hgamma;
    RunConfig cj = base;
    cj.kappa = r.params[j];
    RunConfig c0 = base;
    c0.kappa = 0.0;
    r.entries[j].xi_gamma_d_ref =
        xi_gamma_distance(g, cj, r.runs[j], c0, r.reference, base.dt);
  }

  std::vector<double> dvals;
  for (const SweepEntry& e : r.entries) dvals.push_back(e.d_to_ref);
  r.rate_fit = loglog_slope(r.params, dvals);

  r.pass = true;
  for (std::size_t j = 1; j < dvals.size(); ++j)
    if (dvals[j] > dvals[j - 1]) {
      r.pass = false;
      r.note = "distance to the kappa=0 reference is not nonincreasing";
    }
  if (r.pass && dvals.back() > 0.1 * dvals.front()) {
    r.pass = false;
    r.note = "smallest kappa keeps more than 10% of the largest-kappa distance";
  }
  return r;
}

SweepResult epsilon_sweep(const SlabGrid& g, const RunConfig& base,
                          const std::vector<double>& epsilons, const Field& u0, int threads) {
  check_sweep_params(epsilons, true, "epsilon_sweep");
  SweepResult r;
  r.params = epsilons;
  r.runs.resize(epsilons.size());
  r.entries.resize(epsilons.size());

  run_points(threads, int(epsilons.size()), [&](int i) {
    RunConfig cfg = base;
    cfg.eps = epsilons[i];
    try {
      TrajectoryResult t = simulate(g, cfg, u0);
      t.param = cfg.eps;
      r.runs[i] = std::move(t);
    } catch (const std::exception& e) {
      throw SolverError("epsilon=" + std::to_string(cfg.eps) + ": " + e.what());
    }
  });

  fill_entries(g, r, base.dt);

  std::vector<double> pair_params, pair_d;
  for (std::size_t j = 0; j + 1 < r.entries.size(); ++j) {
    pair_params.push_back(r.params[j]);
    pair_d.push_back(r.entries[j].d_pairwise);
  }
  r.rate_fit = loglog_slope(pair_params, pair_d);

  r.pass = true;
  for (std::size_t j = 1; j < pair_d.size(); ++j)
    if (pair_d[j] > pair_d[j - 1]) {
      r.pass = false;
      r.note = "pairwise distances are not nonincreasing";
    }
  bool any_violation = false;
  for (const TrajectoryResult& t : r.runs)
    any_violation = any_violation || t.monitor.linf_obstacle_violation > 0.0;
  if (r.pass && any_violation) {
    for (std::size_t j = 1; j < r.runs.size(); ++j)
      if (!(r.runs[j].monitor.linf_obstacle_violation <
            r.runs[j - 1].monitor.linf_obstacle_violation)) {
        r.pass = false;
        r.note = "obstacle violation does not decay with epsilon";
      }
  }
  return r;
}

ContDepResult continuous_dependence(const SlabGrid& g, const RunConfig& base,
                                    const DataSet& a, const DataSet& b) {
  double ma = mean(g, a.u0), mb = mean(g, b.u0);
  if (std::fabs(ma - mb) > 1e-10)
    throw MeanError("continuous_dependence: data sets have different bulk means (" +
                    std::to_string(ma) + " vs " + std::to_string(mb) + ")");

  RunConfig ca = base, cb = base;
  ca.source = a.source;
  cb.source = b.source;
  TrajectoryResult ra = simulate(g, ca, a.u0);
  TrajectoryResult rb = simulate(g, cb, b.u0);

  ContDepResult out;
  double c_vstar2 = 0, c_h2 = 0, l2v = 0, c_bg2 = 0;
  for (std::size_t k = 0; k < ra.states.size(); ++k) {
    Field w = ra.states[k].u;
    for (int p = 0; p < g.n(); ++p) w.a[p] -= rb.states[k].u.a[p];
    double m = mean(g, w);
    Field wm = w;
    for (double& v : wm.a) v -= m;  // equal means make this a rounding correction
    double vs = vstar_norm(g, wm, base.linear_tol);
    double h = l2_bulk(g, w);
    double bg = l2_boundary(g, trace(g, w));
    c_vstar2 = std::max(c_vstar2, vs * vs);
    c_h2 = std::max(c_h2, h * h);
    c_bg2 = std::max(c_bg2, bg * bg);
    if (k > 0) {
      double hv = h1_norm(g, w);
      l2v += base.dt * hv * hv;
    }
  }
  out.lhs = c_vstar2 + base.tau * c_h2 + l2v + c_bg2;

  Field w0 = a.u0;
  for (int p = 0; p < g.n(); ++p) w0.a[p] -= b.u0.a[p];
  double m0 = mean(g, w0);
  Field w0m = w0;
  for (double& v : w0m.a) v -= m0;
  double r_vstar = vstar_norm(g, w0m, base.linear_tol);
  double r_h = l2_bulk(g, w0);
  double r_bg = l2_boundary(g, trace(g, w0));
  double gq = 0, gbq = 0;
  const int K = int(ra.states.size()) - 1;
  for (int k = 1; k <= K; ++k) {
    double t = ra.states[k].t;
    SourceData sa = eval_or_zero(g, a.source, t);
    SourceData sb = eval_or_zero(g, b.source, t);
    Field dg = sa.g;
    for (int p = 0; p < g.n(); ++p) dg.a[p] -= sb.g.a[p];
    double dn = l2_bulk(g, dg);
    gq += base.dt * dn * dn;
    BoundaryField dgb = sa.g_gamma;
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < g.nx; ++i) dgb.line[l][i] -= sb.g_gamma.line[l][i];
    double dbn = l2_boundary(g, dgb);
    gbq += base.dt * dbn * dbn;
  }
  out.rhs = r_vstar * r_vstar + base.tau * r_h * r_h + r_bg * r_bg + gq + gbq;
  out.ratio = (out.rhs == 0.0 && out.lhs == 0.0) ? 0.0 : out.lhs / out.rhs;
  return out;
}

ContDepStudy contdep_study(const SlabGrid& g, const RunConfig& base, const Field& u0,
                           const std::vector<double>& magnitudes, ContDepMode mode) {
  if (magnitudes.size() < 2)
    throw DomainError("contdep_study: need at least 2 magnitudes");
  for (std::size_t j = 1; j < magnitudes.size(); ++j)
    if (!(magnitudes[j] < magnitudes[j - 1]) || magnitudes[j] <= 0.0)
      throw DomainError("contdep_study: magnitudes must be positive, strictly decreasing");

  ContDepStudy st;
  st.magnitudes = magnitudes;
  DataSet ref{u0, base.source};
  for (double a : magnitudes) {
    DataSet pert = ref;
    if (mode == ContDepMode::perturb_u0) {
      pert.u0 = u0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          pert.u0.a[g.idx(i, j)] +=
              a * std::cos(2.0 * std::numbers::pi * (i * g.hx) / g.Lx);
    } else {
      auto inner = base.source;
      const SlabGrid* gp = &g;
      pert.source = [inner, gp, a](double t) {
        SourceData s = eval_or_zero(*gp, inner, t);
        for (int j = 0; j < gp->ny; ++j)
          for (int i = 0; i < gp->nx; ++i)
            s.g.a[gp->idx(i, j)] += a *
                                    std::cos(2.0 * std::numbers::pi * (i * gp->hx) / gp->Lx) *
                                    (1.0 + (j * gp->hy) / gp->Ly);
        return s;
      };
    }
    st.results.push_back(continuous_dependence(g, base, ref, pert));
  }

  st.pass = true;
  double rmin = 1e300, rmax = 0.0;
  for (std::size_t j = 0; j < st.results.size(); ++j) {
    const ContDepResult& r = st.results[j];
    if (!std::isfinite(r.ratio)) st.pass = false;
    st.c_cap = std::max(st.c_cap, r.ratio);
    rmin = std::min(rmin, r.ratio);
    rmax = std::max(rmax, r.ratio);
    if (j > 0 && r.lhs > st.results[j - 1].lhs) st.pass = false;
  }
  if (rmax > 2.0 * rmin) st.pass = false;
  return st;
}

namespace {

// Manufactured family on the unit slab with linear unit-slope graphs, pi = 0:
// u* = e^{-lam t} cos(kx) q(y). The decay rate lam sets the size of the
// backward-Euler error so the temporal study is not drowned by the spatial
// floor. mu* = e^{-lam t} cos(kx) p(y) solves dt u = lap mu with dnu mu = 0,
// hence p'' - k^2 p = -lam q and p'(0) = p'(1) = 0.
struct MmsFamily {
  double tau, kappa, eps;
  double lam = 1.0;
  double k = 2.0 * std::numbers::pi;
  double bt() const { return 1.0 / (1.0 + eps); }
  double q(double y) const { return 1.0 + y + y * y; }
  double p(double y) const {
    double k3s = k * k * k * std::sinh(k);
    double A = -3.0 * lam / k3s, B = lam / k3s;
    return lam * (q(y) / (k * k) + 2.0 / (k * k * k * k)) + A * std::cosh(k * y) +
           B * std::cosh(k * (1.0 - y));
  }
  double u_exact(double t, double x, double y) const {
    return std::exp(-lam * t) * std::cos(k * x) * q(y);
  }
  Field initial(const SlabGrid& g) const {
    Field f = make_field(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.a[g.idx(i, j)] = u_exact(0.0, i * g.hx, j * g.hy);
    return f;
  }
  SourceData source(const SlabGrid& g, double t) const {
    SourceData s = zero_data(g);
    for (int j = 0; j < g.ny; ++j) {
      double y = j * g.hy;
      double bulk = -lam * tau * q(y) - 2.0 + k * k * q(y) + bt() * q(y) - p(y);
      for (int i = 0; i < g.nx; ++i)
        s.g.a[g.idx(i, j)] = std::exp(-lam * t) * std::cos(k * i * g.hx) * bulk;
    }
    double b0 = -lam * q(0.0) - 1.0 + kappa * k * k * q(0.0) + bt() * q(0.0);
    double b1 = -lam * q(1.0) + 3.0 + kappa * k * k * q(1.0) + bt() * q(1.0);
    for (int i = 0; i < g.nx; ++i) {
      double c = std::exp(-lam * t) * std::cos(k * i * g.hx);
      s.g_gamma.line[0][i] = c * b0;
      s.g_gamma.line[1][i] = c * b1;
    }
    return s;
  }
};

MmsRow mms_run(const MmsFamily& fam, int nx, double dt, double t_end) {
  SlabGrid g(nx, nx + 1, 1.0, 1.0);
  RunConfig cfg;
  cfg.tau = fam.tau;
  cfg.kappa = fam.kappa;
  cfg.eps = fam.eps;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.pot = PotentialPair{};  // plain unit-slope graphs, no perturbation
  cfg.pot.bulk = linear_graph(1.0);
  cfg.pot.boundary = linear_graph(1.0);
  // the sources reach O(k^2 max q) ~ 4e2, so the absolute residual floor of
  // the linear solve sits well above the default tolerance
  cfg.newton_tol = 1e-9;
  cfg.source = [&fam, g](double t) { return fam.source(g, t); };

  MmsRow row;
  row.h = g.hx;
  row.dt = dt;
  run(g, cfg, fam.initial(g), [&](const State&, const State& next, const StepStats&) {
    Field diff = make_field(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        diff.a[g.idx(i, j)] =
            next.u.a[g.idx(i, j)] - fam.u_exact(next.t, i * g.hx, j * g.hy);
    row.err_H = std::max(row.err_H, l2_bulk(g, diff));
    row.err_V = std::max(row.err_V, h1_norm(g, diff));
  });
  return row;
}

}  // namespace

MmsReport manufactured_convergence(const MmsSpec& spec) {
  MmsFamily fam{spec.tau, spec.kappa, spec.eps};
  MmsReport rep;

  std::vector<double> hs, errs_h;
  for (std::size_t j = 0; j < spec.nx_space.size(); ++j) {
    MmsRow row = mms_run(fam, spec.nx_space[j], spec.dt_space, spec.t_end_space);
    if (j > 0) {
      const MmsRow& prev = rep.rows[j - 1];
      row.order_space = std::log(prev.err_H / row.err_H) / std::log(prev.h / row.h);
    }
    hs.push_back(row.h);
    errs_h.push_back(row.err_H);
    rep.rows.push_back(row);
  }
  rep.fitted_space_order = loglog_slope(hs, errs_h);

  std::vector<double> dts, errs_t;
  std::size_t base_rows = rep.rows.size();
  for (std::size_t j = 0; j < spec.dts_time.size(); ++j) {
    MmsRow row = mms_run(fam, spec.nx_time, spec.dts_time[j], spec.t_end_time);
    if (j > 0) {
      const MmsRow& prev = rep.rows[base_rows + j - 1];
      row.order_time = std::log(prev.err_H / row.err_H) / std::log(prev.dt / row.dt);
    }
    dts.push_back(row.dt);
    errs_t.push_back(row.err_H);
    rep.rows.push_back(row);
  }
  rep.fitted_time_order = loglog_slope(dts, errs_t);
  return rep;
}

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "param,d_to_ref,d_pairwise,rate_fit");
  if (!r.entries.empty())
    for (const auto& [name, value] : r.entries.front().monitor.items())
      std::fprintf(f, ",%s", name.c_str());
  std::fprintf(f, "\n");
  for (const SweepEntry& e : r.entries) {
    std::fprintf(f, "%.12e,%.12e,%.12e,%.12e", e.param, e.d_to_ref, e.d_pairwise,
                 r.rate_fit);
    for (const auto& [name, value] : e.monitor.items()) std::fprintf(f, ",%.12e", value);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

void write_mms_csv(const std::string& path, const MmsReport& r) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "h,dt,err_H,err_V,order_space,order_time\n");
  for (const MmsRow& row : r.rows)
    std::fprintf(f, "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n", row.h, row.dt, row.err_H,
                 row.err_V, row.order_space, row.order_time);
  std::fclose(f);
}

}  // namespace chslab
