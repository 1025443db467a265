#include "chslab/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kRootMaxIter = 100;

double clamp(double r, double lo, double hi) { return std::min(hi, std::max(lo, r)); }

// ln(cosh(s)) without overflow.
double log_cosh(double s) {
  double a = std::fabs(s);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Safeguarded Newton on a monotone increasing f within [lo, hi], f(lo) <= 0 <= f(hi).
// Iterates to machine-relative accuracy in x; quadratic convergence keeps this
// well under the iteration cap, with bisection as the fallback.
template <class F, class DF>
double newton_bracketed(F f, DF df, double lo, double hi, double x0, const char* what) {
  double x = clamp(x0, lo, hi);
  double fx = f(x);
  for (int it = 0; it < kRootMaxIter; ++it) {
    if (fx == 0.0) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    double d = df(x);
    double xn = (d > 0.0) ? x - fx / d : lo;  // force bisection on flat derivative
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    double step = std::fabs(xn - x);
    x = xn;
    fx = f(x);
    double tol = 4.0 * kEps * (1.0 + std::fabs(x));
    if (step <= tol || hi - lo <= tol) return x;
  }
  throw ConvergenceError(std::string("resolvent root-finder failed for ") + what);
}

// Resolvent of the logarithmic composite in the variable s = artanh(J):
//   tanh(s) * (1 + eps*drift) + 2*eps*scale*s = r.
double log_resolvent_s(const MonotoneGraph& g, double eps, double r) {
  const double a = eps * g.scale;   // coefficient of 2s
  const double b = 1.0 + eps * g.drift;
  auto f = [&](double s) { return std::tanh(s) * b + 2.0 * a * s - r; };
  auto df = [&](double s) {
    double c = std::cosh(s);
    return b / (c * c) + 2.0 * a;
  };
  if (r == 0.0) return 0.0;
  double span = std::fabs(r) / (2.0 * a) + 5.0;  // |f(sign(r)*span)| >= |r| guaranteed
  double lo = std::min(0.0, std::copysign(span, r));
  double hi = std::max(0.0, std::copysign(span, r));
  return newton_bracketed(f, df, lo, hi, r / (b + 2.0 * a), "logarithmic graph");
}

}  // namespace

MonotoneGraph linear_graph(double slope) { return {GraphKind::linear, slope, 0.0}; }
MonotoneGraph cubic_graph(double coeff, double drift) { return {GraphKind::cubic, coeff, drift}; }
MonotoneGraph obstacle_graph(double drift) { return {GraphKind::obstacle, 1.0, drift}; }
MonotoneGraph logarithmic_graph(double scale) { return {GraphKind::logarithmic, scale, 0.0}; }

const char* kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::linear: return "linear";
    case GraphKind::cubic: return "cubic";
    case GraphKind::obstacle: return "obstacle";
    case GraphKind::logarithmic: return "logarithmic";
  }
  return "?";
}

double domain_radius(const MonotoneGraph& g) {
  return (g.kind == GraphKind::obstacle || g.kind == GraphKind::logarithmic) ? 1.0 : kInf;
}

bool in_domain(const MonotoneGraph& g, double r) {
  switch (g.kind) {
    case GraphKind::obstacle: return std::fabs(r) <= 1.0;
    case GraphKind::logarithmic: return std::fabs(r) < 1.0;
    default: return std::isfinite(r);
  }
}

bool in_domain_interior(const MonotoneGraph& g, double r) {
  if (g.kind == GraphKind::obstacle || g.kind == GraphKind::logarithmic)
    return std::fabs(r) < 1.0;
  return std::isfinite(r);
}

double min_section(const MonotoneGraph& g, double r) {
  if (!in_domain(g, r)) {
    std::ostringstream os;
    os << "min_section: r=" << r << " outside D(beta) of " << kind_name(g.kind) << " graph";
    throw DomainError(os.str());
  }
  switch (g.kind) {
    case GraphKind::linear: return (g.scale + g.drift) * r;
    case GraphKind::cubic: return g.scale * r * r * r + g.drift * r;
    case GraphKind::obstacle:
      // In the interior the base graph is {0}; at +-1 the least-modulus element
      // of [0,inf) resp. (-inf,0] is 0. The drift part is single-valued.
      return g.drift * r;
    case GraphKind::logarithmic:
      return g.scale * (std::log1p(r) - std::log1p(-r)) + g.drift * r;
  }
  return 0.0;
}

double primitive(const MonotoneGraph& g, double r) {
  const double dpart = 0.5 * g.drift * r * r;
  switch (g.kind) {
    case GraphKind::linear: return 0.5 * g.scale * r * r + dpart;
    case GraphKind::cubic: return 0.25 * g.scale * r * r * r * r + dpart;
    case GraphKind::obstacle: return std::fabs(r) <= 1.0 ? dpart : kInf;
    case GraphKind::logarithmic: {
      double a = std::fabs(r);
      if (a > 1.0) return kInf;
      if (a == 1.0) return g.scale * 2.0 * std::log(2.0) + dpart;
      double v = (1.0 + r) * std::log1p(r) + (1.0 - r) * std::log1p(-r);
      return g.scale * v + dpart;
    }
  }
  return 0.0;
}

double resolvent(const MonotoneGraph& g, double eps, double r) {
  switch (g.kind) {
    case GraphKind::linear: return r / (1.0 + eps * (g.scale + g.drift));
    case GraphKind::obstacle: return clamp(r / (1.0 + eps * g.drift), -1.0, 1.0);
    case GraphKind::cubic: {
      if (r == 0.0) return 0.0;
      const double a = eps * g.scale, b = 1.0 + eps * g.drift;
      auto f = [&](double j) { return b * j + a * j * j * j - r; };
      auto df = [&](double j) { return b + 3.0 * a * j * j; };
      double lo = std::min(0.0, r), hi = std::max(0.0, r);
      return newton_bracketed(f, df, lo, hi, r / b, "cubic graph");
    }
    case GraphKind::logarithmic: {
      double j = std::tanh(log_resolvent_s(g, eps, r));
      // tanh can round onto +-1; pull back one ulp to stay in the open domain.
      if (std::fabs(j) >= 1.0) j = std::copysign(std::nextafter(1.0, 0.0), j);
      return j;
    }
  }
  return r;
}

double yosida(const MonotoneGraph& g, double eps, double r) {
  // Evaluated through the identity beta_eps = beta o J_eps rather than
  // (r - J_eps(r))/eps, which cancels catastrophically for small eps.
  switch (g.kind) {
    case GraphKind::linear: {
      double k = g.scale + g.drift;
      return k * r / (1.0 + eps * k);
    }
    case GraphKind::cubic: {
      double j = resolvent(g, eps, r);
      return g.scale * j * j * j + g.drift * j;
    }
    case GraphKind::obstacle: {
      double j0 = r / (1.0 + eps * g.drift);
      if (std::fabs(j0) <= 1.0) return g.drift * j0;  // = (r - J)/eps exactly
      return (r - std::copysign(1.0, j0)) / eps;      // no cancellation: |r| > 1
    }
    case GraphKind::logarithmic: {
      double s = log_resolvent_s(g, eps, r);
      return 2.0 * g.scale * s + g.drift * std::tanh(s);
    }
  }
  return 0.0;
}

double yosida_prime(const MonotoneGraph& g, double eps, double r) {
  // beta_eps'(r) = b'(J) / (1 + eps b'(J)) with b' the composite derivative at
  // the resolvent point; equals 1/eps where the domain constraint is active.
  switch (g.kind) {
    case GraphKind::linear: {
      double bp = g.scale + g.drift;
      return bp / (1.0 + eps * bp);
    }
    case GraphKind::cubic: {
      double j = resolvent(g, eps, r);
      double bp = 3.0 * g.scale * j * j + g.drift;
      return bp / (1.0 + eps * bp);
    }
    case GraphKind::obstacle: {
      if (std::fabs(r / (1.0 + eps * g.drift)) <= 1.0) {
        double bp = g.drift;
        return bp / (1.0 + eps * bp);
      }
      return 1.0 / eps;
    }
    case GraphKind::logarithmic: {
      double s = log_resolvent_s(g, eps, r);
      double c = std::cosh(s);
      double bp = 2.0 * g.scale * c * c + g.drift;  // overflows to +inf harmlessly
      if (!std::isfinite(bp)) return 1.0 / eps;
      return bp / (1.0 + eps * bp);
    }
  }
  return 0.0;
}

double moreau(const MonotoneGraph& g, double eps, double r) {
  // (r - J_eps(r))^2/(2 eps) = eps/2 * beta_eps(r)^2, which avoids forming the
  // near-cancelling difference r - J for small eps.
  double y = yosida(g, eps, r);
  double quad = 0.5 * eps * y * y;
  if (g.kind == GraphKind::logarithmic) {
    double s = log_resolvent_s(g, eps, r);
    double j = std::tanh(s);
    // (1+j)ln(1+j) + (1-j)ln(1-j) evaluated as 2 s tanh(s) - 2 ln cosh(s)
    double hat = g.scale * (2.0 * s * j - 2.0 * log_cosh(s)) + 0.5 * g.drift * j * j;
    return hat + quad;
  }
  return primitive(g, resolvent(g, eps, r)) + quad;
}

PotentialPair regular_pair() {
  PotentialPair p;
  p.bulk = cubic_graph(1.0);
  p.boundary = cubic_graph(1.0);
  p.pi = {-1.0};
  p.pi_gamma = {-1.0};
  p.rho = 1.0;
  p.c0 = 0.01;
  p.same_growth = true;
  return p;
}

PotentialPair logarithmic_pair(double c1) {
  PotentialPair p;
  p.bulk = logarithmic_graph(1.0);
  p.boundary = logarithmic_graph(1.0);
  p.pi = {-2.0 * c1};
  p.pi_gamma = {-2.0 * c1};
  p.rho = 1.0;
  p.c0 = 0.01;
  p.same_growth = true;
  return p;
}

PotentialPair obstacle_pair(double c2) {
  PotentialPair p;
  p.bulk = obstacle_graph();
  p.boundary = obstacle_graph();
  p.pi = {-2.0 * c2};
  p.pi_gamma = {-2.0 * c2};
  p.rho = 1.0;
  p.c0 = 0.01;
  p.same_growth = true;
  return p;
}

std::string DominationReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << ": max violation " << max_violation << " over " << samples
     << " samples";
  if (!pass) os << " (worst: " << worst_check << " at r=" << worst_r << ", eps=" << worst_eps << ")";
  return os.str();
}

DominationReport check_domination(const PotentialPair& p, const std::vector<double>& eps_list,
                                  const std::vector<double>& sample_points, double tol) {
  DominationReport rep;
  auto record = [&](double v, double r, double eps, const char* check) {
    ++rep.samples;
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_r = r;
      rep.worst_eps = eps;
      rep.worst_check = check;
    }
  };
  for (double r : sample_points) {
    if (in_domain(p.boundary, r) && in_domain(p.bulk, r)) {
      double b0 = std::fabs(min_section(p.bulk, r));
      double g0 = std::fabs(min_section(p.boundary, r));
      record(b0 - p.rho * g0 - p.c0, r, 0.0, "minimal-section domination");
      if (p.same_growth) record(g0 / p.rho - p.c0 - b0, r, 0.0, "minimal-section reverse bound");
    }
    for (double eps : eps_list) {
      double be = std::fabs(yosida(p.bulk, eps, r));
      double ge = std::fabs(yosida(p.boundary, eps, r));
      record(be - p.rho * ge - p.c0, r, eps, "yosida domination");
      if (p.same_growth) record(ge / p.rho - p.c0 - be, r, eps, "yosida reverse bound");
    }
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

std::vector<double> domination_sample_points(const PotentialPair& p, int n, double radius) {
  double lim = std::min(radius, domain_radius(p.boundary));
  if (p.boundary.kind == GraphKind::logarithmic || p.bulk.kind == GraphKind::logarithmic)
    lim = std::min(lim, 1.0 - 1e-6);
  std::vector<double> pts;
  pts.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(-lim + 2.0 * lim * i / (n - 1));
  return pts;
}

}  // namespace chslab
