#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chslab/diagnostics.hpp"
#include "chslab/stepper.hpp"

namespace chslab {

// A completed trajectory: every state (u and mu), the per-step records, and
// their time aggregates. simulate() also asserts the mean-of-mu bound on each
// accepted full step.
struct TrajectoryResult {
  double param = 0;  // sweep parameter that produced the run, if any
  std::vector<State> states;
  std::vector<DiagnosticsRecord> records;
  MonitorReport monitor;
};

TrajectoryResult simulate(const SlabGrid& g, const RunConfig& cfg, const Field& u0);

// Distances between two trajectories on the same grid and step ladder:
// max-over-steps in H and H_Gamma, right-endpoint quadrature in V.
struct TrajectoryDistance {
  double c_h = 0;        // max_k |u_a - u_b|_H
  double l2_v = 0;       // (sum_k dt |u_a - u_b|_V^2)^(1/2)
  double c_hgamma = 0;   // max_k |trace diff|_{H_Gamma}
};

TrajectoryDistance trajectory_distance(const SlabGrid& g, const TrajectoryResult& a,
                                       const TrajectoryResult& b, double dt);

struct SweepEntry {
  double param = 0;
  double d_to_ref = 0;       // C([0,T];H) distance to the reference run
  double d_to_ref_l2v = 0;   // L2(0,T;V) distance to the reference run
  double d_to_ref_bnd = 0;   // C([0,T];H_Gamma) distance to the reference run
  double d_pairwise = 0;     // C([0,T];H) distance to the next-smaller parameter
  double xi_gamma_d_ref = 0; // |xi_G(run) - xi_G(ref)|_{L2(0,T;H_Gamma)}
  MonitorReport monitor;
};

struct SweepResult {
  std::vector<double> params;            // strictly decreasing, >= 3 values
  std::vector<SweepEntry> entries;       // aligned with params
  std::vector<TrajectoryResult> runs;    // aligned with params
  TrajectoryResult reference;            // kappa = 0 run (kappa sweep only)
  bool has_reference = false;
  double rate_fit = 0;                   // LSQ slope of log d vs log param
  bool pass = false;
  std::string note;                      // reason when pass is false
};

// Runs one trajectory per kappa plus the kappa = 0 reference of the same
// discrete scheme; PASS means d_to_ref nonincreasing with
// d_last <= 0.1 * d_first.
SweepResult kappa_sweep(const SlabGrid& g, const RunConfig& base,
                        const std::vector<double>& kappas, const Field& u0, int threads = 1);

// Runs one trajectory per epsilon; PASS means pairwise distances nonincreasing
// and, when any run reports a positive obstacle violation, the violation
// strictly decreasing along the list.
SweepResult epsilon_sweep(const SlabGrid& g, const RunConfig& base,
                          const std::vector<double>& epsilons, const Field& u0,
                          int threads = 1);

// One data set for the two-run stability comparison.
struct DataSet {
  Field u0;
  std::function<SourceData(double)> source;  // empty means zero data
};

struct ContDepResult {
  double lhs = 0;    // |w|^2_{C(V*)} + tau |w|^2_{C(H)} + |w|^2_{L2(V)} + |w_G|^2_{C(H_G)}
  double rhs = 0;    // same functional of the data differences
  double ratio = 0;  // lhs / rhs, defined as 0 when both vanish
};

// Two runs from (possibly) different data with equal bulk means; throws
// MeanError when the initial means differ.
ContDepResult continuous_dependence(const SlabGrid& g, const RunConfig& base,
                                    const DataSet& a, const DataSet& b);

enum class ContDepMode { perturb_u0, perturb_g };

struct ContDepStudy {
  std::vector<double> magnitudes;  // strictly decreasing
  std::vector<ContDepResult> results;
  double c_cap = 0;  // max ratio observed
  bool pass = false; // ratios finite, vary <= 2x, lhs decreasing
};

// Compares the base data against a mean-free cosine perturbation of size a for
// each magnitude (applied to u0 or to the bulk source).
ContDepStudy contdep_study(const SlabGrid& g, const RunConfig& base, const Field& u0,
                           const std::vector<double>& magnitudes, ContDepMode mode);

// Manufactured-solution order check for the linear-graph scheme on the unit
// slab: u*(x,y,t) = e^{-t} cos(2 pi x) (1 + y + y^2), with sources derived
// from the strong equations.
struct MmsRow {
  double h = 0, dt = 0, err_H = 0, err_V = 0;
  double order_space = 0, order_time = 0;  // vs previous row of the same study
};

struct MmsSpec {
  std::vector<int> nx_space = {8, 16, 32};
  double dt_space = 2e-4;
  double t_end_space = 0.1;
  int nx_time = 128;
  std::vector<double> dts_time = {0.4, 0.2, 0.1};
  double t_end_time = 1.2;
  double tau = 1.0, kappa = 1.0, eps = 0.1;
};

struct MmsReport {
  std::vector<MmsRow> rows;  // spatial study rows first, then temporal
  double fitted_space_order = 0;
  double fitted_time_order = 0;
};

MmsReport manufactured_convergence(const MmsSpec& spec = {});

// Summary CSV writers shared by the command-line driver.
void write_sweep_csv(const std::string& path, const SweepResult& r);
void write_mms_csv(const std::string& path, const MmsReport& r);

}  // namespace chslab
