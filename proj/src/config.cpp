#include "chslab/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "chslab/errors.hpp"
#include "chslab/graphs.hpp"

namespace chslab {

namespace {

struct TomlValue {
  std::string raw;        // unquoted token text
  bool is_string = false; // came from a quoted literal
  int line = 0;
};

using TomlTable = std::map<std::string, TomlValue>;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      return false;
  return !(k.front() == '.' || k.back() == '.' || k.find("..") != std::string::npos);
}

// Strips a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    else if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

// Minimal TOML subset: [section] headers, key = value with dotted keys,
// quoted strings (no escapes), bare scalars, # comments.
TomlTable parse_toml_text(const std::string& text) {
  TomlTable t;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section))
        throw ParseError("config line " + std::to_string(lineno) + ": bad section name '" +
                         section + "'");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ParseError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    TomlValue v;
    v.line = lineno;
    if (!val.empty() && val.front() == '"') {
      if (val.size() < 2 || val.back() != '"')
        throw ParseError("config line " + std::to_string(lineno) + ": unterminated string");
      v.raw = val.substr(1, val.size() - 2);
      v.is_string = true;
    } else if (val.empty()) {
      throw ParseError("config line " + std::to_string(lineno) + ": missing value for '" + key +
                       "'");
    } else {
      v.raw = val;
    }
    std::string full = section.empty() ? key : section + "." + key;
    if (t.count(full))
      throw ParseError("config line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
    t.emplace(std::move(full), std::move(v));
  }
  return t;
}

// Typed access over the parsed table; every type problem is collected as a
// violation so the user sees the complete list in one pass.
class Reader {
 public:
  explicit Reader(TomlTable t) : t_(std::move(t)) {}

  bool has(const std::string& key) const { return t_.count(key) != 0; }

  double number(const std::string& key, double dflt) {
    const TomlValue* v = fetch(key);
    if (!v) return dflt;
    if (v->is_string) return complain(key, *v, "a number"), dflt;
    char* end = nullptr;
    double x = std::strtod(v->raw.c_str(), &end);
    if (end == v->raw.c_str() || *end != '\0') return complain(key, *v, "a number"), dflt;
    return x;
  }

  int integer(const std::string& key, int dflt) {
    double x = number(key, double(dflt));
    if (x != std::floor(x) || std::fabs(x) > 1e9) {
      if (has(key)) violations.push_back(key + ": expected an integer");
      return dflt;
    }
    return int(x);
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t dflt) {
    const TomlValue* v = fetch(key);
    if (!v) return dflt;
    char* end = nullptr;
    unsigned long long x = std::strtoull(v->raw.c_str(), &end, 10);
    if (v->is_string || end == v->raw.c_str() || *end != '\0')
      return complain(key, *v, "an unsigned integer"), dflt;
    return x;
  }

  bool boolean(const std::string& key, bool dflt) {
    const TomlValue* v = fetch(key);
    if (!v) return dflt;
    if (v->raw == "true") return true;
    if (v->raw == "false") return false;
    return complain(key, *v, "true or false"), dflt;
  }

  std::string str(const std::string& key, const std::string& dflt) {
    const TomlValue* v = fetch(key);
    if (!v) return dflt;
    if (!v->is_string) return complain(key, *v, "a quoted string"), dflt;
    return v->raw;
  }

  // Any key never fetched is unknown: almost always a typo.
  void check_unknown() {
    for (const auto& [key, val] : t_)
      if (!used_.count(key))
        violations.push_back(key + " (line " + std::to_string(val.line) + "): unknown key");
  }

  std::vector<std::string> violations;

 private:
  const TomlValue* fetch(const std::string& key) {
    auto it = t_.find(key);
    if (it == t_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  void complain(const std::string& key, const TomlValue& v, const char* want) {
    violations.push_back(key + ": expected " + want + ", got '" + v.raw + "'");
  }

  TomlTable t_;
  std::set<std::string> used_;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// Graph spec under a key prefix such as "potentials.bulk": kind plus the
// parameters that kind accepts.
MonotoneGraph read_graph(Reader& r, const std::string& prefix, const MonotoneGraph& dflt,
                         std::vector<std::string>& out) {
  std::string dflt_kind = kind_name(dflt.kind);
  std::string kind = r.str(prefix + ".kind", dflt_kind);
  bool has_scale = r.has(prefix + ".scale");
  bool has_drift = r.has(prefix + ".drift");
  double scale = r.number(prefix + ".scale", kind == dflt_kind ? dflt.scale : 1.0);
  double drift = r.number(prefix + ".drift", kind == dflt_kind ? dflt.drift : 0.0);
  if (kind == "linear") {
    if (scale < 0.0)
      out.push_back(prefix + ".scale = " + fmt(scale) + ": a linear graph needs slope >= 0 (A1)");
    if (has_drift) out.push_back(prefix + ".drift: a linear graph takes no drift");
    return linear_graph(scale);
  }
  if (kind == "cubic") {
    if (!(scale > 0.0))
      out.push_back(prefix + ".scale = " + fmt(scale) +
                    ": a cubic graph needs a positive coefficient (A1)");
    return cubic_graph(scale > 0.0 ? scale : 1.0, drift);
  }
  if (kind == "obstacle") {
    if (has_scale) out.push_back(prefix + ".scale: the obstacle graph takes no scale");
    return obstacle_graph(drift);
  }
  if (kind == "logarithmic") {
    if (!(scale > 0.0))
      out.push_back(prefix + ".scale = " + fmt(scale) +
                    ": a logarithmic graph needs a positive scale (A1)");
    if (has_drift) out.push_back(prefix + ".drift: the logarithmic graph takes no drift");
    return logarithmic_graph(scale > 0.0 ? scale : 1.0);
  }
  out.push_back(prefix + ".kind = '" + kind +
                "': must be one of linear, cubic, obstacle, logarithmic");
  return dflt;
}

SourceSpec read_source(Reader& r, const std::string& prefix, std::vector<std::string>& out) {
  SourceSpec s;
  s.kind = r.str(prefix + ".kind", "zero");
  s.value = r.number(prefix + ".value", 0.0);
  s.amplitude = r.number(prefix + ".amplitude", 0.0);
  s.mode = r.integer(prefix + ".mode", 1);
  if (s.kind != "zero" && s.kind != "constant" && s.kind != "cosine")
    out.push_back(prefix + ".kind = '" + s.kind + "': must be one of zero, constant, cosine");
  if (s.kind != "constant" && r.has(prefix + ".value"))
    out.push_back(prefix + ".value: only the constant source takes a value");
  if (s.kind != "cosine") {
    if (r.has(prefix + ".amplitude"))
      out.push_back(prefix + ".amplitude: only the cosine source takes an amplitude");
    if (r.has(prefix + ".mode"))
      out.push_back(prefix + ".mode: only the cosine source takes a mode");
  } else if (s.mode < 1) {
    out.push_back(prefix + ".mode = " + std::to_string(s.mode) + ": must be >= 1");
  }
  if (!std::isfinite(s.value) || !std::isfinite(s.amplitude))
    out.push_back(prefix + ": non-finite source parameter");
  return s;
}

// Keys each u0 kind accepts; anything else present is a collected violation.
void check_u0_keys(Reader& r, const std::string& kind, std::vector<std::string>& out) {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"constant", {"value"}},
      {"fourier", {"mean", "amplitude", "mode_x", "mode_y"}},
      {"random-smooth", {"mean", "amplitude", "cutoff", "seed"}},
      {"file", {"path"}},
  };
  auto it = allowed.find(kind);
  if (it == allowed.end()) {
    out.push_back("data.u0.kind = '" + kind +
                  "': must be one of constant, fourier, random-smooth, file");
    return;
  }
  for (const char* key : {"value", "mean", "amplitude", "mode_x", "mode_y", "cutoff", "seed",
                          "path"})
    if (r.has(std::string("data.u0.") + key) && !it->second.count(key))
      out.push_back(std::string("data.u0.") + key + ": not a parameter of the " + kind +
                    " initial datum");
}

}  // namespace

SlabGrid AppConfig::make_grid() const { return SlabGrid(nx, ny, lx, ly); }

Field AppConfig::make_u0(const SlabGrid& grid) const {
  const double pi = std::numbers::pi;
  Field f = make_field(grid);
  if (u0.kind == "constant") {
    for (double& v : f.a) v = u0.value;
    return f;
  }
  if (u0.kind == "fourier") {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        f.a[grid.idx(i, j)] = u0.mean + u0.amplitude *
                                            std::cos(2.0 * pi * u0.mode_x * i * grid.hx / grid.Lx) *
                                            std::cos(pi * u0.mode_y * j * grid.hy / grid.Ly);
    return f;
  }
  if (u0.kind == "random-smooth") {
    std::mt19937_64 rng(u0.seed);
    auto draw = [&rng]() {
      // uniform in [-1, 1): top 53 bits -> [0,1), fixed mapping for
      // reproducibility across standard libraries
      return 2.0 * (double(rng() >> 11) * 0x1p-53) - 1.0;
    };
    for (double& v : f.a) v = u0.mean;
    for (int kx = 0; kx <= u0.cutoff; ++kx)
      for (int ky = 0; ky <= u0.cutoff; ++ky) {
        if (kx == 0 && ky == 0) continue;
        double c = draw() * u0.amplitude / (1.0 + kx * kx + ky * ky);
        for (int j = 0; j < grid.ny; ++j)
          for (int i = 0; i < grid.nx; ++i)
            f.a[grid.idx(i, j)] += c * std::cos(2.0 * pi * kx * i * grid.hx / grid.Lx) *
                                   std::cos(pi * ky * j * grid.hy / grid.Ly);
      }
    return f;
  }
  if (u0.kind == "file") {
    FieldSnapshot snap = read_field(u0.path);
    bool same = snap.grid.nx == grid.nx && snap.grid.ny == grid.ny &&
                std::fabs(snap.grid.Lx - grid.Lx) <= 1e-12 * grid.Lx &&
                std::fabs(snap.grid.Ly - grid.Ly) <= 1e-12 * grid.Ly;
    if (!same)
      throw ValidationError({"data.u0.path = '" + u0.path + "': snapshot grid " +
                             std::to_string(snap.grid.nx) + "x" + std::to_string(snap.grid.ny) +
                             " does not match the configured grid"});
    return snap.f;
  }
  throw ValidationError({"data.u0.kind = '" + u0.kind + "': unknown initial datum kind"});
}

std::function<SourceData(double)> AppConfig::make_source(const SlabGrid& grid) const {
  if (g.kind == "zero" && g_gamma.kind == "zero") return {};
  const double pi = std::numbers::pi;
  SourceData s;
  s.g = make_field(grid);
  s.g_gamma = BoundaryField(grid.nx);
  auto bulk_value = [&](int i) {
    if (g.kind == "constant") return g.value;
    if (g.kind == "cosine")
      return g.amplitude * std::cos(2.0 * pi * g.mode * i * grid.hx / grid.Lx);
    return 0.0;
  };
  auto boundary_value = [&](int i) {
    if (g_gamma.kind == "constant") return g_gamma.value;
    if (g_gamma.kind == "cosine")
      return g_gamma.amplitude * std::cos(2.0 * pi * g_gamma.mode * i * grid.hx / grid.Lx);
    return 0.0;
  };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) s.g.a[grid.idx(i, j)] = bulk_value(i);
  for (int i = 0; i < grid.nx; ++i) {
    s.g_gamma.line[0][i] = boundary_value(i);
    s.g_gamma.line[1][i] = boundary_value(i);
  }
  return [s](double) { return s; };
}

RunConfig AppConfig::runtime(const SlabGrid& grid) const {
  RunConfig cfg = run;
  cfg.source = make_source(grid);
  return cfg;
}

AppConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Reader r(parse_toml_text(buf.str()));
  std::vector<std::string>& bad = r.violations;

  AppConfig c;
  c.nx = r.integer("grid.nx", 32);
  c.ny = r.integer("grid.ny", 32);
  c.lx = r.number("grid.lx", 1.0);
  c.ly = r.number("grid.ly", 1.0);

  c.run.tau = r.number("physics.tau", 1.0);
  c.run.kappa = r.number("physics.kappa", 1.0);
  c.run.eps = r.number("physics.eps", 0.1);

  bool has_preset = r.has("potentials.preset");
  std::string preset = r.str("potentials.preset", "");
  if (has_preset) {
    if (preset == "regular") c.run.pot = regular_pair();
    else if (preset == "logarithmic") c.run.pot = logarithmic_pair();
    else if (preset == "obstacle") c.run.pot = obstacle_pair();
    else
      bad.push_back("potentials.preset = '" + preset +
                    "': must be one of regular, logarithmic, obstacle");
    for (const char* key :
         {"bulk.kind", "bulk.scale", "bulk.drift", "boundary.kind", "boundary.scale",
          "boundary.drift", "pi.slope", "pi_gamma.slope", "rho", "c0", "same_growth"})
      if (r.has(std::string("potentials.") + key))
        bad.push_back(std::string("potentials.") + key +
                      ": cannot be combined with potentials.preset");
  } else {
    PotentialPair dflt = regular_pair();
    c.run.pot.bulk = read_graph(r, "potentials.bulk", dflt.bulk, bad);
    c.run.pot.boundary = read_graph(r, "potentials.boundary", dflt.boundary, bad);
    c.run.pot.pi.slope = r.number("potentials.pi.slope", dflt.pi.slope);
    c.run.pot.pi_gamma.slope = r.number("potentials.pi_gamma.slope", dflt.pi_gamma.slope);
    c.run.pot.rho = r.number("potentials.rho", dflt.rho);
    c.run.pot.c0 = r.number("potentials.c0", dflt.c0);
    c.run.pot.same_growth = r.boolean("potentials.same_growth", dflt.same_growth);
  }

  c.u0.kind = r.str("data.u0.kind", "constant");
  c.u0.value = r.number("data.u0.value", 0.0);
  c.u0.mean = r.number("data.u0.mean", 0.0);
  c.u0.amplitude = r.number("data.u0.amplitude", 0.1);
  c.u0.mode_x = r.integer("data.u0.mode_x", 1);
  c.u0.mode_y = r.integer("data.u0.mode_y", 0);
  c.u0.cutoff = r.integer("data.u0.cutoff", 4);
  c.u0.seed = r.unsigned64("data.u0.seed", 1);
  c.u0.path = r.str("data.u0.path", "");
  check_u0_keys(r, c.u0.kind, bad);
  c.g = read_source(r, "data.g", bad);
  c.g_gamma = read_source(r, "data.g_gamma", bad);

  c.run.dt = r.number("time.dt", c.run.dt);
  c.run.t_end = r.number("time.t_end", c.run.t_end);

  c.run.newton_tol = r.number("solver.newton_tol", c.run.newton_tol);
  c.run.newton_max_iter = r.integer("solver.newton_max_iter", c.run.newton_max_iter);
  c.run.linear_tol = r.number("solver.linear_tol", c.run.linear_tol);
  std::string split = r.str("solver.splitting", "implicit-convex");
  if (split == "implicit-convex") c.run.splitting = Splitting::implicit_convex;
  else if (split == "fully-implicit") c.run.splitting = Splitting::fully_implicit;
  else
    bad.push_back("solver.splitting = '" + split +
                  "': must be implicit-convex or fully-implicit");

  c.out_dir = r.str("output.directory", "out");
  c.snapshot_every = r.integer("output.snapshot_every", 0);

  r.check_unknown();

  // range checks; every failed one is reported
  if (c.nx < 4) bad.push_back("grid.nx = " + std::to_string(c.nx) + ": must be >= 4");
  if (c.ny < 4) bad.push_back("grid.ny = " + std::to_string(c.ny) + ": must be >= 4");
  if (!(c.lx > 0.0)) bad.push_back("grid.lx = " + fmt(c.lx) + ": must be positive");
  if (!(c.ly > 0.0)) bad.push_back("grid.ly = " + fmt(c.ly) + ": must be positive");
  if (!(c.run.tau >= 0.0 && c.run.tau <= 1.0))
    bad.push_back("physics.tau = " + fmt(c.run.tau) +
                  ": must lie in [0, 1] (viscosity and surface diffusion are normalized to unit "
                  "upper bounds)");
  if (!(c.run.kappa >= 0.0 && c.run.kappa <= 1.0))
    bad.push_back("physics.kappa = " + fmt(c.run.kappa) +
                  ": must lie in [0, 1] (viscosity and surface diffusion are normalized to unit "
                  "upper bounds)");
  if (!(c.run.eps > 0.0 && c.run.eps <= 1.0))
    bad.push_back("physics.eps = " + fmt(c.run.eps) +
                  ": the regularization parameter must lie in (0, 1]");
  if (!std::isfinite(c.run.pot.pi.slope))
    bad.push_back("potentials.pi.slope: must be finite (A3)");
  if (!std::isfinite(c.run.pot.pi_gamma.slope))
    bad.push_back("potentials.pi_gamma.slope: must be finite (A3)");
  if (!(c.run.pot.rho >= 1.0))
    bad.push_back("potentials.rho = " + fmt(c.run.pot.rho) +
                  ": the domination constant must satisfy rho >= 1 (A2)");
  if (!(c.run.pot.c0 > 0.0))
    bad.push_back("potentials.c0 = " + fmt(c.run.pot.c0) +
                  ": the domination offset must be positive (A2)");
  if (!(c.run.dt > 0.0)) bad.push_back("time.dt = " + fmt(c.run.dt) + ": must be positive");
  if (!(c.run.t_end > 0.0))
    bad.push_back("time.t_end = " + fmt(c.run.t_end) + ": must be positive");
  if (!(c.run.newton_tol > 0.0))
    bad.push_back("solver.newton_tol = " + fmt(c.run.newton_tol) + ": must be positive");
  if (c.run.newton_max_iter < 1)
    bad.push_back("solver.newton_max_iter = " + std::to_string(c.run.newton_max_iter) +
                  ": must be >= 1");
  if (!(c.run.linear_tol > 0.0))
    bad.push_back("solver.linear_tol = " + fmt(c.run.linear_tol) + ": must be positive");
  if (c.snapshot_every < 0)
    bad.push_back("output.snapshot_every = " + std::to_string(c.snapshot_every) +
                  ": must be >= 0");
  if (c.out_dir.empty()) bad.push_back("output.directory: must not be empty");
  if (c.u0.kind == "file" && c.u0.path.empty())
    bad.push_back("data.u0.path: required for the file initial datum");
  if (c.u0.cutoff < 0)
    bad.push_back("data.u0.cutoff = " + std::to_string(c.u0.cutoff) + ": must be >= 0");
  if (!std::isfinite(c.u0.value) || !std::isfinite(c.u0.mean) || !std::isfinite(c.u0.amplitude))
    bad.push_back("data.u0: non-finite parameter");

  // admissibility of the initial datum needs the actual field (A4); only
  // construct it once everything above is sound
  if (bad.empty()) {
    SlabGrid grid = c.make_grid();
    Field f = c.make_u0(grid);
    double radius_bulk = domain_radius(c.run.pot.bulk);
    double radius_bnd = domain_radius(c.run.pot.boundary);
    double worst = 0.0;
    for (double v : f.a) worst = std::max(worst, std::fabs(v));
    double worst_tr = 0.0;
    for (const auto& line : trace(grid, f).line)
      for (double v : line) worst_tr = std::max(worst_tr, std::fabs(v));
    if (worst > radius_bulk)
      bad.push_back("data.u0: attains |u0| = " + fmt(worst) + " outside the bulk graph domain [-" +
                    fmt(radius_bulk) + ", " + fmt(radius_bulk) + "] (A4)");
    if (worst_tr > radius_bnd)
      bad.push_back("data.u0: trace attains |u0| = " + fmt(worst_tr) +
                    " outside the boundary graph domain [-" + fmt(radius_bnd) + ", " +
                    fmt(radius_bnd) + "] (A4)");
    double m0 = mean(grid, f);
    // strict interiority with a margin covering the quadrature rounding of
    // the discrete mean
    if (!(std::fabs(m0) < radius_bnd * (1.0 - 1e-9)))
      bad.push_back("data.u0: mean m0 = " + fmt(m0) +
                    " is not interior to the boundary graph domain (-" + fmt(radius_bnd) + ", " +
                    fmt(radius_bnd) + ") (A4)");
  }

  if (!bad.empty()) throw ValidationError(bad);
  return c;
}

std::string render_config(const AppConfig& c) {
  std::ostringstream os;
  auto graph_line = [&](const char* name, const MonotoneGraph& g) {
    os << "potentials." << name << ".kind = " << kind_name(g.kind) << "\n";
    os << "potentials." << name << ".scale = " << fmt(g.scale) << "\n";
    os << "potentials." << name << ".drift = " << fmt(g.drift) << "\n";
  };
  os << "grid.nx = " << c.nx << "\n";
  os << "grid.ny = " << c.ny << "\n";
  os << "grid.lx = " << fmt(c.lx) << "\n";
  os << "grid.ly = " << fmt(c.ly) << "\n";
  os << "physics.tau = " << fmt(c.run.tau) << "\n";
  os << "physics.kappa = " << fmt(c.run.kappa) << "\n";
  os << "physics.eps = " << fmt(c.run.eps) << "\n";
  graph_line("bulk", c.run.pot.bulk);
  graph_line("boundary", c.run.pot.boundary);
  os << "potentials.pi.slope = " << fmt(c.run.pot.pi.slope) << "\n";
  os << "potentials.pi_gamma.slope = " << fmt(c.run.pot.pi_gamma.slope) << "\n";
  os << "potentials.rho = " << fmt(c.run.pot.rho) << "\n";
  os << "potentials.c0 = " << fmt(c.run.pot.c0) << "\n";
  os << "potentials.same_growth = " << (c.run.pot.same_growth ? "true" : "false") << "\n";
  os << "data.u0.kind = " << c.u0.kind << "\n";
  if (c.u0.kind == "constant") os << "data.u0.value = " << fmt(c.u0.value) << "\n";
  if (c.u0.kind == "fourier") {
    os << "data.u0.mean = " << fmt(c.u0.mean) << "\n";
    os << "data.u0.amplitude = " << fmt(c.u0.amplitude) << "\n";
    os << "data.u0.mode_x = " << c.u0.mode_x << "\n";
    os << "data.u0.mode_y = " << c.u0.mode_y << "\n";
  }
  if (c.u0.kind == "random-smooth") {
    os << "data.u0.mean = " << fmt(c.u0.mean) << "\n";
    os << "data.u0.amplitude = " << fmt(c.u0.amplitude) << "\n";
    os << "data.u0.cutoff = " << c.u0.cutoff << "\n";
    os << "data.u0.seed = " << c.u0.seed << "\n";
  }
  if (c.u0.kind == "file") os << "data.u0.path = " << c.u0.path << "\n";
  auto source_lines = [&](const char* name, const SourceSpec& s) {
    os << "data." << name << ".kind = " << s.kind << "\n";
    if (s.kind == "constant") os << "data." << name << ".value = " << fmt(s.value) << "\n";
    if (s.kind == "cosine") {
      os << "data." << name << ".amplitude = " << fmt(s.amplitude) << "\n";
      os << "data." << name << ".mode = " << s.mode << "\n";
    }
  };
  source_lines("g", c.g);
  source_lines("g_gamma", c.g_gamma);
  os << "time.dt = " << fmt(c.run.dt) << "\n";
  os << "time.t_end = " << fmt(c.run.t_end) << "\n";
  os << "solver.newton_tol = " << fmt(c.run.newton_tol) << "\n";
  os << "solver.newton_max_iter = " << c.run.newton_max_iter << "\n";
  os << "solver.linear_tol = " << fmt(c.run.linear_tol) << "\n";
  os << "solver.splitting = "
     << (c.run.splitting == Splitting::implicit_convex ? "implicit-convex" : "fully-implicit")
     << "\n";
  os << "output.directory = " << c.out_dir << "\n";
  os << "output.snapshot_every = " << c.snapshot_every << "\n";
  return os.str();
}

}  // namespace chslab
