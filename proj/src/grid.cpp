#include "chslab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chslab {

SlabGrid::SlabGrid(int nx_, int ny_, double Lx_, double Ly_)
    : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
  if (nx < 4 || ny < 4) throw DomainError("SlabGrid: nx and ny must both be >= 4");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw DomainError("SlabGrid: Lx and Ly must be positive");
  hx = Lx / nx;
  hy = Ly / (ny - 1);
}

Field make_field(const SlabGrid& g, double fill) { return Field(g.nx, g.ny, fill); }

BoundaryField trace(const SlabGrid& g, const Field& z) {
  BoundaryField b(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    b.line[0][i] = z(i, 0);
    b.line[1][i] = z(i, g.ny - 1);
  }
  return b;
}

double integral_bulk(const SlabGrid& g, const Field& z) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double rs = 0.0;
    for (int i = 0; i < g.nx; ++i) rs += z(i, j);
    s += rs * g.w(j);
  }
  return s;
}

double mean(const SlabGrid& g, const Field& z) { return integral_bulk(g, z) / g.area(); }

double dot_bulk(const SlabGrid& g, const Field& z, const Field& v) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double rs = 0.0;
    for (int i = 0; i < g.nx; ++i) rs += z(i, j) * v(i, j);
    s += rs * g.w(j);
  }
  return s;
}

double integral_boundary(const SlabGrid& g, const BoundaryField& b) {
  double s = 0.0;
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < g.nx; ++i) s += b.line[l][i];
  return s * g.hx;
}

double boundary_mean(const SlabGrid& g, const BoundaryField& b) {
  return integral_boundary(g, b) / g.boundary_measure();
}

double dot_boundary(const SlabGrid& g, const BoundaryField& b, const BoundaryField& c) {
  double s = 0.0;
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < g.nx; ++i) s += b.line[l][i] * c.line[l][i];
  return s * g.hx;
}

Field laplacian_neumann(const SlabGrid& g, const Field& z) {
  Field out(g.nx, g.ny);
  const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double xx = (z(g.ip(i), j) - 2.0 * z(i, j) + z(g.im(i), j)) * ax;
      double yy;
      if (j == 0)
        yy = 2.0 * (z(i, 1) - z(i, 0)) * ay;
      else if (j == g.ny - 1)
        yy = 2.0 * (z(i, g.ny - 2) - z(i, g.ny - 1)) * ay;
      else
        yy = (z(i, j + 1) - 2.0 * z(i, j) + z(i, j - 1)) * ay;
      out(i, j) = xx + yy;
    }
  }
  return out;
}

Field laplacian_bulk(const SlabGrid& g, const Field& z) {
  Field out(g.nx, g.ny);
  const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double xx = (z(g.ip(i), j) - 2.0 * z(i, j) + z(g.im(i), j)) * ax;
      double yy;
      if (j == 0)
        yy = (z(i, 0) - 2.0 * z(i, 1) + z(i, 2)) * ay;
      else if (j == g.ny - 1)
        yy = (z(i, g.ny - 1) - 2.0 * z(i, g.ny - 2) + z(i, g.ny - 3)) * ay;
      else
        yy = (z(i, j + 1) - 2.0 * z(i, j) + z(i, j - 1)) * ay;
      out(i, j) = xx + yy;
    }
  }
  return out;
}

BoundaryField normal_derivative(const SlabGrid& g, const Field& z) {
  BoundaryField b(g.nx);
  const double c = 1.0 / (2.0 * g.hy);
  const int m = g.ny - 1;
  for (int i = 0; i < g.nx; ++i) {
    b.line[0][i] = (3.0 * z(i, 0) - 4.0 * z(i, 1) + z(i, 2)) * c;
    b.line[1][i] = (3.0 * z(i, m) - 4.0 * z(i, m - 1) + z(i, m - 2)) * c;
  }
  return b;
}

BoundaryField laplace_beltrami(const SlabGrid& g, const BoundaryField& b) {
  BoundaryField out(g.nx);
  const double ax = 1.0 / (g.hx * g.hx);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < g.nx; ++i)
      out.line[l][i] = (b.line[l][g.ip(i)] - 2.0 * b.line[l][i] + b.line[l][g.im(i)]) * ax;
  return out;
}

double dirichlet_form(const SlabGrid& g, const Field& z, const Field& v) {
  double s = 0.0;
  const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
  // x-edges: weight hx * wy(j) per edge, difference quotient squared carries 1/hx^2
  for (int j = 0; j < g.ny; ++j) {
    double rs = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      int k = g.ip(i);
      rs += (z(k, j) - z(i, j)) * (v(k, j) - v(i, j));
    }
    s += rs * ax * g.hx * g.wy(j);
  }
  // y-edges: weight hx * hy per edge
  double ys = 0.0;
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      ys += (z(i, j + 1) - z(i, j)) * (v(i, j + 1) - v(i, j));
  s += ys * ay * g.hx * g.hy;
  return s;
}

double boundary_dirichlet_form(const SlabGrid& g, const BoundaryField& b, const BoundaryField& c) {
  double s = 0.0;
  const double ax = 1.0 / (g.hx * g.hx);
  for (int l = 0; l < 2; ++l) {
    double rs = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      int k = g.ip(i);
      rs += (b.line[l][k] - b.line[l][i]) * (c.line[l][k] - c.line[l][i]);
    }
    s += rs * ax * g.hx;
  }
  return s;
}

double l2_bulk(const SlabGrid& g, const Field& z) { return std::sqrt(dot_bulk(g, z, z)); }
double h1_seminorm(const SlabGrid& g, const Field& z) { return std::sqrt(dirichlet_form(g, z, z)); }
double h1_norm(const SlabGrid& g, const Field& z) {
  return std::sqrt(dot_bulk(g, z, z) + dirichlet_form(g, z, z));
}
double l2_boundary(const SlabGrid& g, const BoundaryField& b) {
  return std::sqrt(dot_boundary(g, b, b));
}
double h1_boundary_seminorm(const SlabGrid& g, const BoundaryField& b) {
  return std::sqrt(boundary_dirichlet_form(g, b, b));
}
double vgamma_norm(const SlabGrid& g, const BoundaryField& b) {
  return std::sqrt(dot_boundary(g, b, b) + boundary_dirichlet_form(g, b, b));
}

Field inverse_neumann(const SlabGrid& g, const Field& z, double rel_tol) {
  const double zn = l2_bulk(g, z);
  const double mean_tol = 1e-8 * std::max(1.0, zn);
  const double mz = mean(g, z);
  if (std::fabs(mz) > mean_tol) {
    std::ostringstream os;
    os << "inverse_neumann: input mean " << mz << " exceeds tolerance " << mean_tol;
    throw MeanError(os.str());
  }
  Field x(g.nx, g.ny, 0.0);
  if (zn == 0.0) return x;

  // CG for A x = b with A = -laplacian_neumann, SPD on the mean-free subspace
  // under the weighted inner product; the iterate is re-projected onto the
  // mean-free subspace every step.
  Field b = z;
  for (auto& v : b.a) v -= mz;
  Field r = b;  // x = 0
  Field p = r;
  double rr = dot_bulk(g, r, r);
  // Absolute floor: rounding in the mean projection leaves O(ulp)-size kernel
  // residue that CG cannot reduce; below it the data is constant to rounding.
  const double stop = std::max(rel_tol * l2_bulk(g, b), 1e-14 * zn);
  const int max_iter = 20 * g.n() + 100;
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= stop) return x;
    Field ap = laplacian_neumann(g, p);
    for (auto& v : ap.a) v = -v;
    double pap = dot_bulk(g, p, ap);
    if (!(pap > 0.0)) throw SolverError("inverse_neumann: CG broke down (non-positive curvature)");
    double alpha = rr / pap;
    for (size_t k = 0; k < x.a.size(); ++k) {
      x.a[k] += alpha * p.a[k];
      r.a[k] -= alpha * ap.a[k];
    }
    double mx = mean(g, x);
    for (auto& v : x.a) v -= mx;
    double rr_new = dot_bulk(g, r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (size_t k = 0; k < p.a.size(); ++k) p.a[k] = r.a[k] + beta * p.a[k];
  }
  throw SolverError("inverse_neumann: CG did not converge");
}

double vstar_norm(const SlabGrid& g, const Field& z, double rel_tol) {
  Field w = inverse_neumann(g, z, rel_tol);
  return h1_seminorm(g, w);
}

namespace {

// CG for the periodic 1-D problem -(w_{i+1}-2w_i+w_{i-1})/hx^2 = b_i on one line.
// abs_floor guards against kernel-direction rounding residue in b (e.g. a
// constant line whose mean subtraction leaves a few ulp): below it, stop.
std::vector<double> line_poisson(const SlabGrid& g, const std::vector<double>& b, double rel_tol,
                                 double abs_floor) {
  const int n = g.nx;
  const double ax = 1.0 / (g.hx * g.hx);
  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u[i] * v[i];
    return s * g.hx;
  };
  auto apply = [&](const std::vector<double>& u) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
      out[i] = -(u[g.ip(i)] - 2.0 * u[i] + u[g.im(i)]) * ax;
    return out;
  };
  std::vector<double> x(n, 0.0), r = b, p = b;
  double rr = dot(r, r);
  const double stop = std::max(rel_tol * std::sqrt(rr), abs_floor);
  if (std::sqrt(rr) <= stop) return x;
  for (int it = 0; it < 20 * n + 100; ++it) {
    if (std::sqrt(rr) <= stop) return x;
    auto ap = apply(p);
    double pap = dot(p, ap);
    if (!(pap > 0.0)) throw SolverError("inverse_beltrami: CG broke down");
    double alpha = rr / pap;
    double mx = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      mx += x[i];
    }
    mx /= n;
    for (int i = 0; i < n; ++i) x[i] -= mx;
    double rr_new = dot(r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  throw SolverError("inverse_beltrami: CG did not converge");
}

}  // namespace

namespace {

double line_scale(const SlabGrid& g, const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * g.hx);
}

}  // namespace

BoundaryField inverse_beltrami(const SlabGrid& g, const BoundaryField& b, double rel_tol) {
  BoundaryField out(g.nx);
  for (int l = 0; l < 2; ++l) {
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) m += b.line[l][i];
    m /= g.nx;
    std::vector<double> rhs(g.nx);
    for (int i = 0; i < g.nx; ++i) rhs[i] = b.line[l][i] - m;
    out.line[l] = line_poisson(g, rhs, rel_tol, 1e-14 * line_scale(g, b.line[l]));
  }
  return out;
}

double boundary_dual_norm(const SlabGrid& g, const BoundaryField& b, double rel_tol) {
  double total = 0.0;
  const double ax = 1.0 / (g.hx * g.hx);
  for (int l = 0; l < 2; ++l) {
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) m += b.line[l][i];
    m /= g.nx;
    std::vector<double> rhs(g.nx);
    for (int i = 0; i < g.nx; ++i) rhs[i] = b.line[l][i] - m;
    auto w = line_poisson(g, rhs, rel_tol, 1e-14 * line_scale(g, b.line[l]));
    double form = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      double d = w[g.ip(i)] - w[i];
      form += d * d;
    }
    total += form * ax * g.hx + g.Lx * m * m;
  }
  return std::sqrt(total);
}

void write_field(const std::string& path, const SlabGrid& g, const Field& f, double time) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("write_field: cannot open " + path);
  std::fprintf(fp, "%d %d %.17g %.17g %.17g\n", g.nx, g.ny, g.Lx, g.Ly, time);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i)
      std::fprintf(fp, "%.17g%c", f(i, j), i + 1 == g.nx ? '\n' : ' ');
  }
  std::fclose(fp);
}

FieldSnapshot read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_field: cannot open " + path);
  int nx, ny;
  double Lx, Ly, time;
  if (!(in >> nx >> ny >> Lx >> Ly >> time)) throw IoError("read_field: bad header in " + path);
  FieldSnapshot snap;
  snap.grid = SlabGrid(nx, ny, Lx, Ly);
  snap.time = time;
  snap.f = Field(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (!(in >> snap.f(i, j))) throw IoError("read_field: truncated data in " + path);
  return snap;
}

}  // namespace chslab
