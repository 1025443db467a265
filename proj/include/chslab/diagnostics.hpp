#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chslab/stepper.hpp"

namespace chslab {

// One CSV row of per-step monitors; field order matches the CSV schema.
struct DiagnosticsRecord {
  double t = 0;
  double mass = 0;                 // |Omega| * mean(u)
  double energy = 0;               // full free energy incl. perturbation + data terms
  double e_grad = 0;               // (1/2) |grad u|^2
  double e_pot = 0;                // sum of the bulk Moreau envelope
  double e_bgrad = 0;              // (kappa/2) |grad_Gamma u_Gamma|^2
  double e_bpot = 0;               // boundary Moreau envelope sum
  double vstar_dtu = 0;            // |du/dt|_{V*}
  double sqrt_tau_dtu = 0;         // sqrt(tau) |du/dt|_H
  double dtu_gamma = 0;            // |du_Gamma/dt|_{H_Gamma}
  double u_V = 0;                  // |u|_V
  double sqrtkappa_uGamma_V = 0;   // sqrt(kappa) |u_Gamma|_{V_Gamma}
  double mu_V = 0;                 // |mu|_V
  double mu_mean = 0;              // m(mu)
  double xi_H = 0;                 // |beta_eps(u)|_H
  double xiGamma_H = 0;            // |betaG_eps(u_Gamma)|_{H_Gamma}
  double lap_u_H = 0;              // |lap u|_H
  double normal_deriv = 0;         // |dnu u|_{L2(Gamma)}
  double obstacle_violation = 0;   // max(|u|-1, 0) for bounded-domain graphs
};

struct EnergyParts {
  double grad = 0, pot = 0, bgrad = 0, bpot = 0;  // the four CSV energy columns
  double pert = 0, bpert = 0;                     // perturbation primitives
  double data = 0, bdata = 0;                     // -sum g u, -sum gG uG
  double total() const { return grad + pot + bgrad + bpot + pert + bpert + data + bdata; }
};

double total_mass(const SlabGrid& g, const State& s);

// Free energy of the regularized system at the given source snapshot:
//   (1/2)|grad u|^2 + sum moreau(u) + sum Pi(u)
//   + (kappa/2)|grad_G u_G|^2 + sum_G moreauG(u_G) + sum_G PiG(u_G)
//   - sum g u - sum_G gG u_G.
EnergyParts free_energy(const SlabGrid& g, const Field& u, const RunConfig& cfg,
                        const SourceData& src);

// E(prev) - E(next) - dt*D with D = |du/dt|_{V*}^2 + tau|du/dt|_H^2
// + |duG/dt|_{H_G}^2 and dt = next.t - prev.t. For time-independent data and
// the implicit-convex splitting every accepted step gives a nonnegative value
// up to solver rounding.
double dissipation_balance(const SlabGrid& g, const State& prev, const State& next,
                           const RunConfig& cfg, const SourceData& src);

// Slack in the triangle-inequality bound on |m(mu)| obtained by summing the
// chemical-potential and boundary rows with unit weights:
//   |Omega| m(mu) = tau sum w du/dt + sum w (beta_eps(u) + pi(u°) - g)
//                   + sum_G hx (duG/dt + betaG_eps(uG) + piG(uG°) - gG).
// Returns bound - |m(mu)| >= 0 up to the Newton residual, for states produced
// by one accepted (non-halved) step.
double mu_mean_gap(const SlabGrid& g, const State& prev, const State& next,
                   const RunConfig& cfg, const SourceData& src);

// Full per-step record; prev == nullptr marks the initial row (rate monitors 0).
DiagnosticsRecord make_record(const SlabGrid& g, const RunConfig& cfg, const SourceData& src,
                              const State* prev, const State& s);

// L-infinity-in-time and right-endpoint L2-in-time aggregates of a trajectory.
struct MonitorReport {
  double linf_energy = 0;
  double linf_u_V = 0;
  double linf_sqrtkappa_uGamma_V = 0;
  double linf_mu_reduced_V = 0;  // max_k |mu_k - m(mu_k)|_V
  double linf_mu_mean = 0;
  double linf_obstacle_violation = 0;
  double l2_vstar_dtu = 0;
  double l2_sqrt_tau_dtu = 0;
  double l2_dtu_gamma = 0;
  double l2_mu_V = 0;
  double l2_xi_H = 0;
  double l2_xiGamma_H = 0;
  double l2_lap_u_H = 0;
  double l2_normal_deriv = 0;
  std::vector<std::pair<std::string, double>> items() const;
};

MonitorReport estimate_monitor(const std::vector<DiagnosticsRecord>& recs, double dt,
                               double area);

// CSV with the fixed header, %.12e everywhere, one row per record.
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& recs);
extern const char* const kDiagnosticsCsvHeader;

}  // namespace chslab
