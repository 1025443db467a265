#include "chslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "chslab/errors.hpp"

namespace chslab {

const char* const kDiagnosticsCsvHeader =
    "t,mass,energy,e_grad,e_pot,e_bgrad,e_bpot,vstar_dtu,sqrt_tau_dtu,dtu_gamma,"
    "u_V,sqrtkappa_uGamma_V,mu_V,mu_mean,xi_H,xiGamma_H,lap_u_H,normal_deriv,"
    "obstacle_violation";

double total_mass(const SlabGrid& g, const State& s) { return g.area() * mean(g, s.u); }

EnergyParts free_energy(const SlabGrid& g, const Field& u, const RunConfig& cfg,
                        const SourceData& src) {
  EnergyParts e;
  e.grad = 0.5 * dirichlet_form(g, u, u);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double w = g.w(j);
      double v = u.a[g.idx(i, j)];
      e.pot += w * moreau(cfg.pot.bulk, cfg.eps, v);
      e.pert += w * pi_primitive(cfg.pot.pi, v);
      e.data -= w * src.g.a[g.idx(i, j)] * v;
    }
  }
  BoundaryField ub = trace(g, u);
  e.bgrad = 0.5 * cfg.kappa * boundary_dirichlet_form(g, ub, ub);
  for (int l = 0; l < 2; ++l) {
    for (int i = 0; i < g.nx; ++i) {
      double v = ub.line[l][i];
      e.bpot += g.hx * moreau(cfg.pot.boundary, cfg.eps, v);
      e.bpert += g.hx * pi_primitive(cfg.pot.pi_gamma, v);
      e.bdata -= g.hx * src.g_gamma.line[l][i] * v;
    }
  }
  return e;
}

namespace {

// (du/dt, duGamma/dt) between two states.
struct Rates {
  Field bulk;
  BoundaryField bnd;
};

Rates rates(const SlabGrid& g, const State& prev, const State& next) {
  double dt = next.t - prev.t;
  Rates r;
  r.bulk = make_field(g);
  for (int p = 0; p < g.n(); ++p) r.bulk.a[p] = (next.u.a[p] - prev.u.a[p]) / dt;
  r.bnd = trace(g, r.bulk);
  return r;
}

double vstar_of_rate(const SlabGrid& g, Field rate, double rel_tol) {
  double m = mean(g, rate);
  for (double& v : rate.a) v -= m;  // conservation makes m ~ solver residual
  return vstar_norm(g, rate, rel_tol);
}

}  // namespace

double dissipation_balance(const SlabGrid& g, const State& prev, const State& next,
                           const RunConfig& cfg, const SourceData& src) {
  double dt = next.t - prev.t;
  Rates r = rates(g, prev, next);
  double vs = vstar_of_rate(g, r.bulk, cfg.linear_tol);
  double hb = l2_bulk(g, r.bulk);
  double hg = l2_boundary(g, r.bnd);
  double diss = vs * vs + cfg.tau * hb * hb + hg * hg;
  double e0 = free_energy(g, prev.u, cfg, src).total();
  double e1 = free_energy(g, next.u, cfg, src).total();
  return e0 - e1 - dt * diss;
}

double mu_mean_gap(const SlabGrid& g, const State& prev, const State& next,
                   const RunConfig& cfg, const SourceData& src) {
  Rates r = rates(g, prev, next);
  const Field& upi = (cfg.splitting == Splitting::fully_implicit) ? next.u : prev.u;
  double bound = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      int p = g.idx(i, j);
      bound += g.w(j) * (cfg.tau * std::fabs(r.bulk.a[p]) +
                         std::fabs(yosida(cfg.pot.bulk, cfg.eps, next.u.a[p])) +
                         std::fabs(pi_eval(cfg.pot.pi, upi.a[p])) + std::fabs(src.g.a[p]));
    }
  }
  BoundaryField ub = trace(g, next.u), upib = trace(g, upi);
  for (int l = 0; l < 2; ++l) {
    for (int i = 0; i < g.nx; ++i) {
      bound += g.hx * (std::fabs(r.bnd.line[l][i]) +
                       std::fabs(yosida(cfg.pot.boundary, cfg.eps, ub.line[l][i])) +
                       std::fabs(pi_eval(cfg.pot.pi_gamma, upib.line[l][i])) +
                       std::fabs(src.g_gamma.line[l][i]));
    }
  }
  return bound / g.area() - std::fabs(mean(g, next.mu));
}

DiagnosticsRecord make_record(const SlabGrid& g, const RunConfig& cfg, const SourceData& src,
                              const State* prev, const State& s) {
  DiagnosticsRecord rec;
  rec.t = s.t;
  rec.mass = total_mass(g, s);
  EnergyParts e = free_energy(g, s.u, cfg, src);
  rec.energy = e.total();
  rec.e_grad = e.grad;
  rec.e_pot = e.pot;
  rec.e_bgrad = e.bgrad;
  rec.e_bpot = e.bpot;
  if (prev != nullptr) {
    Rates r = rates(g, *prev, s);
    rec.vstar_dtu = vstar_of_rate(g, r.bulk, cfg.linear_tol);
    rec.sqrt_tau_dtu = std::sqrt(cfg.tau) * l2_bulk(g, r.bulk);
    rec.dtu_gamma = l2_boundary(g, r.bnd);
  }
  rec.u_V = h1_norm(g, s.u);
  BoundaryField ub = trace(g, s.u);
  rec.sqrtkappa_uGamma_V = std::sqrt(cfg.kappa) * vgamma_norm(g, ub);
  rec.mu_V = h1_norm(g, s.mu);
  rec.mu_mean = mean(g, s.mu);
  Field xi = yosida_field(cfg.pot.bulk, cfg.eps, s.u);
  rec.xi_H = l2_bulk(g, xi);
  BoundaryField xib = yosida_boundary(cfg.pot.boundary, cfg.eps, ub);
  rec.xiGamma_H = l2_boundary(g, xib);
  rec.lap_u_H = l2_bulk(g, laplacian_bulk(g, s.u));
  rec.normal_deriv = l2_boundary(g, normal_derivative(g, s.u));
  if (std::isfinite(domain_radius(cfg.pot.bulk)) ||
      std::isfinite(domain_radius(cfg.pot.boundary))) {
    double worst = 0.0;
    for (double v : s.u.a) worst = std::max(worst, std::fabs(v) - 1.0);
    rec.obstacle_violation = worst;
  }
  return rec;
}

std::vector<std::pair<std::string, double>> MonitorReport::items() const {
  return {{"linf_energy", linf_energy},
          {"linf_u_V", linf_u_V},
          {"linf_sqrtkappa_uGamma_V", linf_sqrtkappa_uGamma_V},
          {"linf_mu_reduced_V", linf_mu_reduced_V},
          {"linf_mu_mean", linf_mu_mean},
          {"linf_obstacle_violation", linf_obstacle_violation},
          {"l2_vstar_dtu", l2_vstar_dtu},
          {"l2_sqrt_tau_dtu", l2_sqrt_tau_dtu},
          {"l2_dtu_gamma", l2_dtu_gamma},
          {"l2_mu_V", l2_mu_V},
          {"l2_xi_H", l2_xi_H},
          {"l2_xiGamma_H", l2_xiGamma_H},
          {"l2_lap_u_H", l2_lap_u_H},
          {"l2_normal_deriv", l2_normal_deriv}};
}

MonitorReport estimate_monitor(const std::vector<DiagnosticsRecord>& recs, double dt,
                               double area) {
  MonitorReport m;
  double s_vstar = 0, s_tau = 0, s_dgamma = 0, s_mu = 0, s_xi = 0, s_xig = 0, s_lap = 0,
         s_nd = 0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const DiagnosticsRecord& r = recs[k];
    m.linf_energy = std::max(m.linf_energy, std::fabs(r.energy));
    m.linf_u_V = std::max(m.linf_u_V, r.u_V);
    m.linf_sqrtkappa_uGamma_V = std::max(m.linf_sqrtkappa_uGamma_V, r.sqrtkappa_uGamma_V);
    m.linf_mu_mean = std::max(m.linf_mu_mean, std::fabs(r.mu_mean));
    m.linf_obstacle_violation = std::max(m.linf_obstacle_violation, r.obstacle_violation);
    double red2 = r.mu_V * r.mu_V - r.mu_mean * r.mu_mean * area;
    m.linf_mu_reduced_V = std::max(m.linf_mu_reduced_V, std::sqrt(std::max(0.0, red2)));
    if (k == 0) continue;  // L2-in-time sums use right endpoints
    s_vstar += dt * r.vstar_dtu * r.vstar_dtu;
    s_tau += dt * r.sqrt_tau_dtu * r.sqrt_tau_dtu;
    s_dgamma += dt * r.dtu_gamma * r.dtu_gamma;
    s_mu += dt * r.mu_V * r.mu_V;
    s_xi += dt * r.xi_H * r.xi_H;
    s_xig += dt * r.xiGamma_H * r.xiGamma_H;
    s_lap += dt * r.lap_u_H * r.lap_u_H;
    s_nd += dt * r.normal_deriv * r.normal_deriv;
  }
  m.l2_vstar_dtu = std::sqrt(s_vstar);
  m.l2_sqrt_tau_dtu = std::sqrt(s_tau);
  m.l2_dtu_gamma = std::sqrt(s_dgamma);
  m.l2_mu_V = std::sqrt(s_mu);
  m.l2_xi_H = std::sqrt(s_xi);
  m.l2_xiGamma_H = std::sqrt(s_xig);
  m.l2_lap_u_H = std::sqrt(s_lap);
  m.l2_normal_deriv = std::sqrt(s_nd);
  return m;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& recs) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "%s\n", kDiagnosticsCsvHeader);
  for (const DiagnosticsRecord& r : recs) {
    std::fprintf(f,
                 "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,"
                 "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n",
                 r.t, r.mass, r.energy, r.e_grad, r.e_pot, r.e_bgrad, r.e_bpot, r.vstar_dtu,
                 r.sqrt_tau_dtu, r.dtu_gamma, r.u_V, r.sqrtkappa_uGamma_V, r.mu_V, r.mu_mean,
                 r.xi_H, r.xiGamma_H, r.lap_u_H, r.normal_deriv, r.obstacle_violation);
  }
  std::fclose(f);
}

}  // namespace chslab
