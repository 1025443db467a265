#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "chslab/errors.hpp"

namespace chslab {

// Rectangular slab [0,Lx] x [0,Ly], periodic in x, with two dynamic boundary
// lines: line 0 at y=0 and line 1 at y=Ly. Nodes sit at x_i = i*hx
// (i = 0..nx-1, hx = Lx/nx) and y_j = j*hy (j = 0..ny-1, hy = Ly/(ny-1)).
// Quadrature is uniform in x and trapezoidal in y (half weight on the two
// boundary rows), so the discrete area is exactly Lx*Ly and each boundary
// line carries weight hx per node (total boundary measure 2*Lx).
struct SlabGrid {
  int nx = 0, ny = 0;
  double Lx = 0, Ly = 0;
  double hx = 0, hy = 0;

  SlabGrid() = default;
  SlabGrid(int nx_, int ny_, double Lx_, double Ly_);

  int n() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  double x(int i) const { return i * hx; }
  double y(int j) const { return j * hy; }
  // Trapezoidal weight of row j in y.
  double wy(int j) const { return (j == 0 || j == ny - 1) ? 0.5 * hy : hy; }
  // Full quadrature weight of node (i,j).
  double w(int j) const { return hx * wy(j); }
  double area() const { return Lx * Ly; }
  double boundary_measure() const { return 2.0 * Lx; }
  int ip(int i) const { return i + 1 == nx ? 0 : i + 1; }
  int im(int i) const { return i == 0 ? nx - 1 : i - 1; }
};

// Nodal field of shape nx x ny, stored row-major with y as the outer index.
struct Field {
  int nx = 0, ny = 0;
  std::vector<double> a;

  Field() = default;
  Field(int nx_, int ny_, double fill = 0.0) : nx(nx_), ny(ny_), a(size_t(nx_) * ny_, fill) {}
  double& operator()(int i, int j) { return a[size_t(j) * nx + i]; }
  double operator()(int i, int j) const { return a[size_t(j) * nx + i]; }
  size_t size() const { return a.size(); }
};

Field make_field(const SlabGrid& g, double fill = 0.0);

// Values on the two boundary lines; line[0] is y=0, line[1] is y=Ly.
struct BoundaryField {
  std::array<std::vector<double>, 2> line;

  BoundaryField() = default;
  explicit BoundaryField(int nx, double fill = 0.0) {
    line[0].assign(size_t(nx), fill);
    line[1].assign(size_t(nx), fill);
  }
  int nx() const { return int(line[0].size()); }
};

BoundaryField trace(const SlabGrid& g, const Field& z);

// -- integrals and means ------------------------------------------------------
double integral_bulk(const SlabGrid& g, const Field& z);
double mean(const SlabGrid& g, const Field& z);
double dot_bulk(const SlabGrid& g, const Field& z, const Field& v);
double integral_boundary(const SlabGrid& g, const BoundaryField& b);
double boundary_mean(const SlabGrid& g, const BoundaryField& b);
double dot_boundary(const SlabGrid& g, const BoundaryField& b, const BoundaryField& c);

// -- discrete operators -------------------------------------------------------

// Neumann Laplacian: 5-point stencil, periodic in x, mirror ghost closure in y.
// Its weighted sum is exactly zero, and for all fields z, v
//   sum_Omega (Lap_N z) v w = -dirichlet_form(z, v).
Field laplacian_neumann(const SlabGrid& g, const Field& z);

// Bulk Laplacian: interior rows as above; on the boundary rows the y-part is
// the one-sided second difference. Appears in the chemical-potential equation
// where the field does not satisfy a Neumann condition.
Field laplacian_bulk(const SlabGrid& g, const Field& z);

// Outward normal derivative on the two boundary lines, defined as the boundary
// residual of the summation-by-parts formula, which lands on the one-sided
// second-order stencil (3 z0 - 4 z1 + z2) / (2 hy) toward the interior:
//   sum_Omega (Lap_B z) v w = -dirichlet_form(z, v) + sum_Gamma (dnu z) v w_Gamma
// holds exactly (Lap_B = laplacian_bulk, w_Gamma = hx).
BoundaryField normal_derivative(const SlabGrid& g, const Field& z);

// Laplace-Beltrami operator: periodic 1-D second difference along each line.
BoundaryField laplace_beltrami(const SlabGrid& g, const BoundaryField& b);

// Discrete Dirichlet forms (edge-weighted sums of gradient products).
double dirichlet_form(const SlabGrid& g, const Field& z, const Field& v);
double boundary_dirichlet_form(const SlabGrid& g, const BoundaryField& b, const BoundaryField& c);

// -- norms ---------------------------------------------------------------------
double l2_bulk(const SlabGrid& g, const Field& z);
double h1_seminorm(const SlabGrid& g, const Field& z);
double h1_norm(const SlabGrid& g, const Field& z);
double l2_boundary(const SlabGrid& g, const BoundaryField& b);
double h1_boundary_seminorm(const SlabGrid& g, const BoundaryField& b);
double vgamma_norm(const SlabGrid& g, const BoundaryField& b);

// Inverse Neumann operator N: solves laplacian_neumann(w) = -z with mean(w)=0
// for mean-free z, by conjugate gradients on the mean-free subspace
// (mean re-projection every iteration). rel_tol is relative to |z|.
Field inverse_neumann(const SlabGrid& g, const Field& z, double rel_tol = 1e-10);

// Dual (H^-1 type) norm: h1_seminorm(inverse_neumann(z)). Input must be
// mean-free up to mean_tol = 1e-8 * max(1, |z|); MeanError otherwise.
double vstar_norm(const SlabGrid& g, const Field& z, double rel_tol = 1e-10);

// Per-line inverse of the Laplace-Beltrami operator on mean-free line data.
BoundaryField inverse_beltrami(const SlabGrid& g, const BoundaryField& b, double rel_tol = 1e-10);

// Dual-norm surrogate on the boundary: for each line, split b = m + (b - m)
// with m the line mean; the mean-free part is measured through the inverse
// Laplace-Beltrami operator and the mean part through the constant pairing:
//   ||b||^2 = sum_lines ( |grad_Gamma N_Gamma (b-m)|^2 + Lx * m^2 ).
double boundary_dual_norm(const SlabGrid& g, const BoundaryField& b, double rel_tol = 1e-10);

// -- snapshot I/O ---------------------------------------------------------------
// ASCII format: header line "nx ny Lx Ly time", then nx*ny reals in row-major
// (y-outer) order. Extension: .field
struct FieldSnapshot {
  SlabGrid grid;
  Field f;
  double time = 0.0;
};

void write_field(const std::string& path, const SlabGrid& g, const Field& f, double time);
FieldSnapshot read_field(const std::string& path);

}  // namespace chslab
