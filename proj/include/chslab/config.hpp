#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "chslab/grid.hpp"
#include "chslab/stepper.hpp"

namespace chslab {

// Source-term shape selectable from the config file; time-independent.
//   zero      g = 0
//   constant  g = value
//   cosine    g = amplitude * cos(2*pi*mode*x/Lx), mean-free, constant in y
// The boundary spec applies the same profile on both boundary lines.
struct SourceSpec {
  std::string kind = "zero";
  double value = 0.0;
  double amplitude = 0.0;
  int mode = 1;
};

// Initial-datum shape.
//   constant       u0 = value
//   fourier        u0 = mean + amplitude * cos(2*pi*mode_x*x/Lx) * cos(pi*mode_y*y/Ly)
//   random-smooth  u0 = mean + amplitude * sum_{0<=kx,ky<=cutoff, kx+ky>0}
//                       c_{kx,ky} / (1+kx^2+ky^2) * cos(2*pi*kx*x/Lx) * cos(pi*ky*y/Ly)
//                  with c_{kx,ky} drawn uniformly from [-1,1) by a seeded
//                  mt19937_64 (53-bit mantissa mapping), in row-major (kx outer)
//                  order, so the field is reproducible bit-for-bit
//   file           u0 read from a .field snapshot whose grid must match
struct InitialSpec {
  std::string kind = "constant";
  double value = 0.0;
  double mean = 0.0;
  double amplitude = 0.1;
  int mode_x = 1;
  int mode_y = 0;
  int cutoff = 4;
  std::uint64_t seed = 1;
  std::string path;
};

// A fully resolved configuration file: defaults filled in, every admissibility
// condition checked. The run member carries [physics], [potentials], [time]
// and [solver]; its source callback is left empty and assembled per grid by
// runtime().
struct AppConfig {
  int nx = 32, ny = 32;        // [grid]
  double lx = 1.0, ly = 1.0;
  RunConfig run;
  InitialSpec u0;              // [data] u0.*
  SourceSpec g, g_gamma;       // [data] g.*, g_gamma.*
  std::string out_dir = "out"; // [output]
  int snapshot_every = 0;      // 0: snapshot only the final state

  SlabGrid make_grid() const;
  // Deterministic construction of the initial datum; file kind may throw
  // IoError (unreadable) or ValidationError (grid mismatch).
  Field make_u0(const SlabGrid& grid) const;
  // Empty function when both sources are zero (the stepper treats empty as
  // zero data).
  std::function<SourceData(double)> make_source(const SlabGrid& grid) const;
  RunConfig runtime(const SlabGrid& grid) const;
};

// Parses a config file (a TOML subset: [section] headers, possibly dotted
// keys, scalar values, # comments) and validates every admissibility
// condition, collecting ALL violations rather than stopping at the first.
// The rule labels (A1)-(A4) in the messages name the documented admissibility
// conditions: (A1) graph monotonicity/well-formedness, (A2) domination
// constants rho >= 1, c0 > 0, (A3) finite perturbation slopes, (A4) initial
// datum inside the graph domains with mean interior to the boundary-graph
// domain. Throws ParseError (syntax), ValidationError (rule violations, with
// the full list), IoError (unreadable file).
AppConfig parse_config(const std::string& path);

// "key = value" echo of the resolved configuration, one line per field, in
// file order; printed by the CLI so every run records the exact inputs.
std::string render_config(const AppConfig& c);

}  // namespace chslab
