#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chslab/config.hpp"
#include "chslab/errors.hpp"
#include "chslab/experiments.hpp"
#include "chslab/graphs.hpp"
#include "chslab/plot.hpp"

namespace fs = std::filesystem;
using namespace chslab;

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) throw DomainError(std::string(what) + ": empty entry in list '" + text + "'");
    char* end = nullptr;
    double v = std::strtod(cur.c_str(), &end);
    if (end == cur.c_str() || *end != '\0')
      throw DomainError(std::string(what) + ": '" + cur + "' is not a number");
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') flush();
    else if (c != ' ') cur += c;
  }
  flush();
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string point_csv_name(const std::string& dir, const char* stem, double param) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", param);
  return dir + "/" + stem + "_" + buf + ".csv";
}

// The run subcommand takes ceil(t_end/dt) uniform steps, extending the horizon
// to the next step boundary when t_end is not a multiple of dt; every CSV then
// has exactly ceil(t_end/dt) + 1 rows.
long step_count(const RunConfig& cfg) {
  return std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9));
}

void print_monitor(const MonitorReport& m) {
  for (const auto& [name, value] : m.items()) std::printf("%-28s % .6e\n", name.c_str(), value);
}

struct ConfigOpt {
  std::string path;
};

AppConfig load(const ConfigOpt& opt) {
  AppConfig c = parse_config(opt.path);
  std::fputs(render_config(c).c_str(), stdout);
  return c;
}

int cmd_run(const ConfigOpt& opt) {
  AppConfig c = load(opt);
  SlabGrid g = c.make_grid();
  RunConfig cfg = c.runtime(g);
  long steps = step_count(cfg);
  cfg.t_end = double(steps) * cfg.dt;
  std::printf("steps = %ld\n", steps);

  TrajectoryResult tr = simulate(g, cfg, c.make_u0(g));

  ensure_dir(c.out_dir);
  write_diagnostics_csv(c.out_dir + "/diagnostics.csv", tr.records);
  for (long k = 0; k <= steps; ++k) {
    bool last = k == steps;
    bool due = c.snapshot_every > 0 && k % c.snapshot_every == 0;
    if (!due && !last) continue;
    char name[64];
    std::snprintf(name, sizeof name, "/u_%06ld.field", k);
    write_field(c.out_dir + name, g, tr.states[size_t(k)].u, tr.states[size_t(k)].t);
  }
  print_monitor(tr.monitor);
  std::printf("wrote %s/diagnostics.csv\n", c.out_dir.c_str());
  return 0;
}

int report_sweep(const AppConfig& c, const SweepResult& r, const char* stem) {
  ensure_dir(c.out_dir);
  for (size_t j = 0; j < r.runs.size(); ++j)
    write_diagnostics_csv(point_csv_name(c.out_dir, stem, r.params[j]), r.runs[j].records);
  if (r.has_reference)
    write_diagnostics_csv(c.out_dir + "/" + stem + "_ref.csv", r.reference.records);
  std::string summary = c.out_dir + "/sweep_" + stem + ".csv";
  write_sweep_csv(summary, r);
  for (size_t j = 0; j < r.entries.size(); ++j)
    std::printf("%s = %-8g d_to_ref = %.6e  d_pairwise = %.6e\n", stem, r.params[j],
                r.entries[j].d_to_ref, r.entries[j].d_pairwise);
  std::printf("rate_fit = %.4f\n", r.rate_fit);
  std::printf("wrote %s\n", summary.c_str());
  if (!r.pass) {
    std::fprintf(stderr, "sweep acceptance FAILED: %s\n", r.note.c_str());
    return 3;
  }
  std::printf("sweep acceptance PASSED\n");
  return 0;
}

int cmd_sweep_kappa(const ConfigOpt& opt, const std::string& kappas, int threads) {
  AppConfig c = load(opt);
  std::vector<double> ks = parse_list(kappas, "--kappas");
  // a trailing 0 names the reference run, which every kappa sweep performs
  // anyway; drop it rather than reject the natural invocation
  if (!ks.empty() && ks.back() == 0.0) ks.pop_back();
  SlabGrid g = c.make_grid();
  SweepResult r = kappa_sweep(g, c.runtime(g), ks, c.make_u0(g), threads);
  return report_sweep(c, r, "kappa");
}

int cmd_sweep_epsilon(const ConfigOpt& opt, const std::string& epsilons, int threads) {
  AppConfig c = load(opt);
  SlabGrid g = c.make_grid();
  SweepResult r = epsilon_sweep(g, c.runtime(g), parse_list(epsilons, "--epsilons"), c.make_u0(g),
                                threads);
  return report_sweep(c, r, "epsilon");
}

int cmd_contdep(const ConfigOpt& opt, const std::string& magnitudes, const std::string& mode) {
  AppConfig c = load(opt);
  SlabGrid g = c.make_grid();
  ContDepMode m = mode == "g" ? ContDepMode::perturb_g : ContDepMode::perturb_u0;
  ContDepStudy st =
      contdep_study(g, c.runtime(g), c.make_u0(g), parse_list(magnitudes, "--magnitudes"), m);
  ensure_dir(c.out_dir);
  std::string path = c.out_dir + "/contdep.csv";
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write '" + path + "'");
  std::fprintf(f, "magnitude,lhs,rhs,ratio\n");
  for (size_t i = 0; i < st.results.size(); ++i)
    std::fprintf(f, "%.12e,%.12e,%.12e,%.12e\n", st.magnitudes[i], st.results[i].lhs,
                 st.results[i].rhs, st.results[i].ratio);
  std::fclose(f);
  for (size_t i = 0; i < st.results.size(); ++i)
    std::printf("magnitude = %-8g lhs = %.6e  rhs = %.6e  ratio = %.4f\n", st.magnitudes[i],
                st.results[i].lhs, st.results[i].rhs, st.results[i].ratio);
  std::printf("max ratio = %.4f\nwrote %s\n", st.c_cap, path.c_str());
  if (!st.pass) {
    std::fprintf(stderr, "stability acceptance FAILED: ratios vary by more than 2x or the "
                         "perturbation response does not shrink\n");
    return 3;
  }
  std::printf("stability acceptance PASSED\n");
  return 0;
}

int cmd_manufactured(const ConfigOpt& opt) {
  AppConfig c = load(opt);
  MmsReport rep = manufactured_convergence();
  ensure_dir(c.out_dir);
  std::string path = c.out_dir + "/mms.csv";
  write_mms_csv(path, rep);
  for (const MmsRow& row : rep.rows)
    std::printf("h = %-10g dt = %-8g err_H = %.6e  err_V = %.6e  order_space = %.3f  "
                "order_time = %.3f\n",
                row.h, row.dt, row.err_H, row.err_V, row.order_space, row.order_time);
  std::printf("fitted orders: space = %.4f (target 2 +/- 0.3), time = %.4f (target 1 +/- 0.3)\n",
              rep.fitted_space_order, rep.fitted_time_order);
  std::printf("wrote %s\n", path.c_str());
  bool ok = std::fabs(rep.fitted_space_order - 2.0) <= 0.3 &&
            std::fabs(rep.fitted_time_order - 1.0) <= 0.3;
  if (!ok) {
    std::fprintf(stderr, "convergence-order acceptance FAILED\n");
    return 3;
  }
  std::printf("convergence-order acceptance PASSED\n");
  return 0;
}

int cmd_verify_graphs(const ConfigOpt& opt) {
  AppConfig c = load(opt);
  const PotentialPair& pot = c.run.pot;
  std::vector<double> eps_list = {1e-1, 1e-2, 1e-3, 1e-4};
  DominationReport rep = check_domination(pot, eps_list, domination_sample_points(pot));
  std::printf("bulk graph:     %s\n", kind_name(pot.bulk.kind));
  std::printf("boundary graph: %s\n", kind_name(pot.boundary.kind));
  std::printf("rho = %g, c0 = %g, same_growth = %s\n", pot.rho, pot.c0,
              pot.same_growth ? "true" : "false");
  std::printf("%s\n", rep.summary().c_str());
  if (!rep.pass) {
    std::fprintf(stderr, "graph verification FAILED: %s\n", rep.summary().c_str());
    return 3;
  }
  return 0;
}

int cmd_plot(const std::string& csv, std::string out, const std::string& columns, bool logx,
             bool logy) {
  CsvTable t = read_csv(csv);
  if (t.names.size() < 2 || t.columns[0].empty())
    throw IoError("plot: '" + csv + "' has no plottable data");

  std::vector<std::string> chosen;
  if (!columns.empty()) {
    std::string cur;
    for (char ch : columns + ",") {
      if (ch == ',') {
        if (!cur.empty()) chosen.push_back(cur);
        cur.clear();
      } else if (ch != ' ') {
        cur += ch;
      }
    }
  } else if (t.column("energy") >= 0) {
    chosen = {"energy"};  // diagnostics series default
  } else if (t.column("d_to_ref") >= 0) {
    chosen = {"d_to_ref", "d_pairwise"};  // sweep summary default
  } else {
    for (size_t i = 1; i < t.names.size(); ++i) chosen.push_back(t.names[i]);
  }

  std::vector<PlotSeries> series;
  for (const std::string& name : chosen) {
    int col = t.column(name);
    if (col < 0) throw DomainError("plot: no column named '" + name + "' in " + csv);
    if (col == 0) continue;
    series.push_back({name, t.columns[0], t.columns[size_t(col)]});
  }
  if (series.empty()) throw DomainError("plot: no series selected");

  if (out.empty()) {
    out = csv;
    size_t dot = out.find_last_of('.');
    if (dot != std::string::npos && out.find('/', dot) == std::string::npos) out.resize(dot);
    out += ".svg";
  }
  PlotOptions popt;
  popt.title = fs::path(csv).filename().string();
  popt.xlabel = t.names[0];
  popt.logx = logx;
  popt.logy = logy;
  write_svg_line_chart(out, series, popt);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const MeanError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NewtonDivergence& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chslab: Cahn-Hilliard slab solver with dynamic boundary conditions"};
  app.require_subcommand(1);

  ConfigOpt cfg;
  int threads = 1;
  std::string kappas = "1,0.5,0.25,0.125,0.0625";
  std::string epsilons = "1e-1,1e-2,1e-3,1e-4";
  std::string magnitudes = "1e-1,1e-2,1e-3";
  std::string mode = "u0";
  std::string plot_csv, plot_out, plot_columns;
  bool logx = false, logy = false;

  auto add_config = [&cfg](CLI::App* sub) {
    sub->add_option("--config", cfg.path, "configuration file")->required();
  };

  CLI::App* s_run = app.add_subcommand("run", "integrate one trajectory, write diagnostics CSV "
                                              "and field snapshots");
  add_config(s_run);

  CLI::App* s_sk = app.add_subcommand("sweep-kappa", "surface-diffusion sweep against the "
                                                     "kappa = 0 reference");
  add_config(s_sk);
  s_sk->add_option("--kappas", kappas, "comma-separated decreasing list; a trailing 0 names the "
                                       "reference run");
  s_sk->add_option("--threads", threads, "max parallel runs");

  CLI::App* s_se = app.add_subcommand("sweep-epsilon", "regularization sweep over decreasing "
                                                       "epsilon");
  add_config(s_se);
  s_se->add_option("--epsilons", epsilons, "comma-separated decreasing list in (0, 1]");
  s_se->add_option("--threads", threads, "max parallel runs");

  CLI::App* s_cd = app.add_subcommand("contdep", "two-run stability ratios under mean-free data "
                                                 "perturbations");
  add_config(s_cd);
  s_cd->add_option("--magnitudes", magnitudes, "comma-separated decreasing perturbation sizes");
  s_cd->add_option("--mode", mode, "perturb u0 or g")->check(CLI::IsMember({"u0", "g"}));

  CLI::App* s_mms = app.add_subcommand("manufactured", "convergence orders against the exact "
                                                       "manufactured solution");
  add_config(s_mms);

  CLI::App* s_vg = app.add_subcommand("verify-graphs", "sampled domination report for the "
                                                       "configured graph pair");
  add_config(s_vg);

  CLI::App* s_plot = app.add_subcommand("plot", "render a CSV as an SVG line chart");
  s_plot->add_option("csv", plot_csv, "input CSV (diagnostics or sweep summary)")->required();
  s_plot->add_option("--out", plot_out, "output SVG path (default: input with .svg)");
  s_plot->add_option("--columns", plot_columns, "comma-separated column names to draw");
  s_plot->add_flag("--logx", logx, "logarithmic x axis");
  s_plot->add_flag("--logy", logy, "logarithmic y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (s_run->parsed()) return guarded([&] { return cmd_run(cfg); });
  if (s_sk->parsed()) return guarded([&] { return cmd_sweep_kappa(cfg, kappas, threads); });
  if (s_se->parsed()) return guarded([&] { return cmd_sweep_epsilon(cfg, epsilons, threads); });
  if (s_cd->parsed()) return guarded([&] { return cmd_contdep(cfg, magnitudes, mode); });
  if (s_mms->parsed()) return guarded([&] { return cmd_manufactured(cfg); });
  if (s_vg->parsed()) return guarded([&] { return cmd_verify_graphs(cfg); });
  if (s_plot->parsed())
    return guarded([&] { return cmd_plot(plot_csv, plot_out, plot_columns, logx, logy); });
  return 1;
}
