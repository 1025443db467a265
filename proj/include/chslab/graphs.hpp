#pragma once

#include <limits>
#include <string>
#include <vector>

#include "chslab/errors.hpp"

namespace chslab {

// Catalog of maximal monotone graphs on R. Each graph is an affine composite
//   beta(r) = scale * base(r) + drift * r
// of one of four base graphs:
//   linear       base(r) = r                                  D = R
//   cubic        base(r) = r^3                                D = R
//   obstacle     base(r) = subdifferential of I_{[-1,1]}(r)   D = [-1,1]
//   logarithmic  base(r) = ln(1+r) - ln(1-r)                  D = (-1,1)
// scale > 0 (scale >= 0 for linear) and drift >= 0 keep the composite maximal
// monotone with 0 in beta(0).
enum class GraphKind { linear, cubic, obstacle, logarithmic };

struct MonotoneGraph {
  GraphKind kind = GraphKind::linear;
  double scale = 1.0;
  double drift = 0.0;
};

MonotoneGraph linear_graph(double slope);
MonotoneGraph cubic_graph(double coeff, double drift = 0.0);
MonotoneGraph obstacle_graph(double drift = 0.0);
MonotoneGraph logarithmic_graph(double scale = 1.0);

const char* kind_name(GraphKind k);

// Effective domain D(beta). Obstacle is closed, logarithmic is open.
bool in_domain(const MonotoneGraph& g, double r);
bool in_domain_interior(const MonotoneGraph& g, double r);
// Half-width of the domain: +inf for linear/cubic, 1 for obstacle/logarithmic.
double domain_radius(const MonotoneGraph& g);

// Minimal section beta0(r): the element of beta(r) of least modulus.
// Throws DomainError outside D(beta).
double min_section(const MonotoneGraph& g, double r);

// Convex primitive beta_hat with beta_hat(0) = 0; +inf outside the closure of
// the domain of the primitive.
double primitive(const MonotoneGraph& g, double r);

// Resolvent J_eps(r) = (I + eps*beta)^{-1}(r). Single-valued, nonexpansive,
// J_eps(0) = 0. Closed form for linear/obstacle; safeguarded Newton with
// bisection fallback (absolute tolerance 1e-12, max 100 iterations) otherwise.
double resolvent(const MonotoneGraph& g, double eps, double r);

// Yosida approximation beta_eps(r) = (r - J_eps(r)) / eps.
double yosida(const MonotoneGraph& g, double eps, double r);

// Derivative of the Yosida approximation where it exists (a.e. for obstacle).
double yosida_prime(const MonotoneGraph& g, double eps, double r);

// Moreau envelope beta_hat_eps(r) = beta_hat(J_eps(r)) + (r-J_eps(r))^2/(2 eps).
double moreau(const MonotoneGraph& g, double eps, double r);

// Lipschitz perturbation pi(r) = slope * r.
struct Perturbation {
  double slope = 0.0;
};

inline double pi_eval(const Perturbation& p, double r) { return p.slope * r; }
// Primitive with value 0 at 0.
inline double pi_primitive(const Perturbation& p, double r) { return 0.5 * p.slope * r * r; }
inline double pi_lipschitz(const Perturbation& p) { return p.slope < 0 ? -p.slope : p.slope; }

// Bulk/boundary graph pair with perturbations and domination constants:
//   |beta0(r)| <= rho * |beta0_Gamma(r)| + c0   on D(beta_Gamma),
// and, when same_growth is set, also the reverse bound
//   (1/rho) * |beta0_Gamma(r)| - c0 <= |beta0(r)|.
// Both inequalities transfer to the Yosida approximations with the same
// constants; check_domination verifies this by sampling.
struct PotentialPair {
  MonotoneGraph bulk, boundary;
  Perturbation pi, pi_gamma;
  double rho = 1.0;
  double c0 = 0.01;
  bool same_growth = false;
};

// The three standard potentials, split as F' = beta + pi:
//   regular       F(r) = (1/4)(r^2-1)^2,  beta(r) = r^3,            pi(r) = -r
//   logarithmic   F(r) = (1+r)ln(1+r) + (1-r)ln(1-r) - c1 r^2,
//                 beta(r) = ln(1+r) - ln(1-r),                      pi(r) = -2 c1 r
//   obstacle      F(r) = c2 (1-r^2) + I_{[-1,1]}(r),
//                 beta = subdifferential of I_{[-1,1]},              pi(r) = -2 c2 r
// The same potential is used on bulk and boundary (same-growth pairs).
PotentialPair regular_pair();
PotentialPair logarithmic_pair(double c1 = 2.0);
PotentialPair obstacle_pair(double c2 = 1.0);

struct DominationReport {
  bool pass = true;
  double max_violation = -std::numeric_limits<double>::infinity();
  double worst_r = 0.0;
  double worst_eps = 0.0;       // 0 marks the minimal-section check
  std::string worst_check;      // which inequality attains max_violation
  long samples = 0;
  std::string summary() const;
};

// Samples the domination inequalities over eps_list x sample_points. The
// minimal-section inequalities are checked on sample points inside
// D(beta_Gamma); the Yosida-level inequalities are checked at every sample
// point. Passes iff max violation <= tol.
DominationReport check_domination(const PotentialPair& p,
                                  const std::vector<double>& eps_list,
                                  const std::vector<double>& sample_points,
                                  double tol = 1e-10);

// Evenly spaced sample points covering [-radius, radius] clipped to the
// boundary-graph domain (open domains are inset slightly).
std::vector<double> domination_sample_points(const PotentialPair& p, int n = 201,
                                             double radius = 3.0);

}  // namespace chslab
