#include "dirac6c/cli.hpp"

#include "dirac6c/config.hpp"
#include "dirac6c/lie.hpp"
#include "dirac6c/spectral.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef DIRAC6C_VERSION
#define DIRAC6C_VERSION "unknown"
#endif

namespace dirac6c {

namespace {

/// Numerical failure: maps to exit code 2.
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> metadata(std::string const &command, RunConfig const &cfg) {
  std::vector<std::string> meta{
      std::string("dirac6c ") + DIRAC6C_VERSION + " csv-schema " +
          std::to_string(kCsvSchemaVersion),
      "command " + command,
      "config-hash " + cfg.hash(),
  };
  std::istringstream echo(cfg.echo());
  for (std::string line; std::getline(echo, line);)
    if (!line.empty())
      meta.push_back("  " + line);
  return meta;
}

std::string fit_text(std::string const &name, OrderFit const &f) {
  return "fit " + name + " " +
         (f.order ? format_real(*f.order) : std::string("saturated")) + " points " +
         std::to_string(f.points_used);
}

/// Runs `write` against the configured CSV file or the output stream.
template <class F> void emit(std::string const &path, std::ostream &out, F &&write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file)
    throw std::runtime_error("cannot open output file '" + path + "'");
  write(file);
}

void emit_gnuplot(RunConfig const &cfg, std::string const &x_column, std::string const &title) {
  if (cfg.gnuplot.empty())
    return;
  std::ofstream file(cfg.gnuplot);
  if (!file)
    throw std::runtime_error("cannot open gnuplot output '" + cfg.gnuplot + "'");
  write_gnuplot_script(file, cfg.csv.empty() ? "results.csv" : cfg.csv, x_column, title);
}

RunOptions options(RunConfig const &cfg) { return {cfg.workers, cfg.resolved_cache_dir()}; }

int cmd_solve(RunConfig const &cfg, std::ostream &out) {
  ProblemConfig const &p = cfg.problem;
  Grid const grid = p.grid();
  Propagation const run = propagate(p, grid, catalog(cfg.scheme), cfg.tau);
  double const m0 = mass(p.initial(grid));
  double const m1 = mass(run.field);
  if (!cfg.dump.empty())
    write_reference_file(cfg.dump, run.field, p, {cfg.scheme, cfg.tau, 0});
  out << "scheme=" << cfg.scheme << " tau=" << format_real(cfg.tau)
      << " steps=" << step_count(p.t_final, cfg.tau) << " t_final=" << format_real(p.t_final)
      << " mass=" << format_real(m1)
      << " mass_drift=" << format_real(m0 == 0.0 ? 0.0 : std::abs(m1 - m0) / m0)
      << " wall_time=" << format_real(run.wall_time) << " config_hash=" << cfg.hash() << '\n';
  return kExitOk;
}

int cmd_converge_time(RunConfig const &cfg, std::ostream &out, std::ostream &err) {
  ConvergenceStudy const s =
      temporal_convergence(cfg.scheme, cfg.taus, cfg.problem, cfg.reference, options(cfg));
  auto meta = metadata("converge-time", cfg);
  meta.push_back("floor " + format_real(s.floor));
  meta.push_back(fit_text("e_phi", s.fit_phi));
  meta.push_back(fit_text("e_rho", s.fit_rho));
  meta.push_back(fit_text("e_J", s.fit_J));
  emit(cfg.csv, out, [&](std::ostream &os) { write_records_csv(os, meta, s.records); });
  emit_gnuplot(cfg, "tau", "temporal convergence, " + cfg.scheme);
  if (s.saturated()) {
    err << "saturated: fewer than three errors above the floor " << format_real(s.floor)
        << "; no order reported\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_converge_space(RunConfig const &cfg, std::ostream &out) {
  ReferenceProtocol proto = cfg.reference;
  proto.tau = cfg.tau;
  ConvergenceStudy const s =
      spatial_convergence(cfg.scheme, cfg.sizes, cfg.problem, proto, options(cfg));
  auto meta = metadata("converge-space", cfg);
  meta.push_back("rate column holds the successive error ratio e(h_prev)/e(h)");
  emit(cfg.csv, out, [&](std::ostream &os) { write_records_csv(os, meta, s.records); });
  emit_gnuplot(cfg, "h", "spatial convergence, " + cfg.scheme);
  return kExitOk;
}

int cmd_superres(RunConfig const &cfg, std::string const &layout, std::ostream &out) {
  ProblemConfig p = cfg.problem;
  if (p.potential != "rational" || p.dim != 1 || p.delta != 1.0 || p.nu != 1.0)
    throw std::invalid_argument(
        "superres requires dim = 1, delta = nu = 1 and the rational potential");
  SweepResult const r = superres_sweep(cfg.sweep, p, options(cfg));
  auto meta = metadata("superres", cfg);
  std::string rates = "max-over-epsilon rates";
  for (double v : r.rates)
    rates += " " + format_real(v);
  meta.push_back(rates);
  emit(cfg.csv, out, [&](std::ostream &os) {
    if (layout == "table")
      write_sweep_table(os, meta, r);
    else
      write_records_csv(os, meta, r.records);
  });
  emit_gnuplot(cfg, "tau", "super-resolution sweep, " + cfg.sweep.scheme);
  return kExitOk;
}

Coeffs table4_doubles() {
  ConstantsTable const &k = builtin_constants();
  Coeffs c{};
  for (std::size_t i = 0; i < 5; ++i)
    c[i] = k.value("S6c.c" + std::to_string(i));
  return c;
}

int cmd_coeffs_derive(std::string const &out_path, int starts, std::uint64_t seed,
                      std::ostream &out) {
  Coeffs const table = table4_doubles();
  Coeffs seed_point{};
  for (std::size_t i = 0; i < 5; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", table[i]);
    seed_point[i] = std::stod(buf);
  }
  NewtonReport const rep = newton_solve(seed_point, 1e-14, 100);
  out << "order conditions: a1-1, a2-1, a3, a4, a5 (coefficients of T, W, [T,W,T], "
         "[T,T,T,T,W], [W,T,T,T,W] in V4)\n";
  auto const conds = order_conditions();
  for (std::size_t i = 0; i < 5; ++i)
    out << "  f" << i + 1 << " = " << conds[i].to_string() << '\n';
  out << "newton: " << rep.message << " after " << rep.iterations << " iterations\n";
  for (std::size_t i = 0; i < 5; ++i)
    out << "  c" << i << " = " << format_real(rep.solution[i]) << "  seed "
        << format_real(seed_point[i]) << "  deviation from tabulated "
        << format_real(std::abs(rep.solution[i] - table[i])) << '\n';
  for (std::size_t i = 0; i < 5; ++i)
    out << "  residual f" << i + 1 << " = " << format_real(rep.residual[i]) << '\n';

  if (starts > 0) {
    MultiStartReport const ms = multi_start_solve(starts, seed);
    std::size_t converged = 0;
    for (auto const &r : ms.runs)
      converged += r.converged ? 1 : 0;
    out << "multi-start: " << starts << " starts, seed " << seed << ", " << converged
        << " converged, " << ms.roots.size() << " distinct roots\n";
    for (Coeffs const &root : ms.roots) {
      out << " ";
      for (double v : root)
        out << ' ' << format_real(v);
      out << '\n';
    }
  }

  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f)
      throw std::runtime_error("cannot open constants output '" + out_path + "'");
    f << "# S6c coefficients re-derived by Newton iteration\n";
    for (std::size_t i = 0; i < 5; ++i)
      f << "S6c.c" << i << " = " << format_real(rep.solution[i]) << '\n';
  }
  if (!rep.converged)
    throw NumericalFailure("Newton iteration did not converge: " + rep.message);
  return kExitOk;
}

int cmd_coeffs_verify(std::ostream &out) {
  ConstantsTable const &k = builtin_constants();
  std::array<std::string, 5> digits;
  for (std::size_t i = 0; i < 5; ++i)
    digits[i] = k.text("S6c.c" + std::to_string(i));
  Coeffs const ext = residuals_extended(digits);
  Coeffs const dbl = residuals(table4_doubles());
  bool ok = true;
  out << "residuals at tabulated constants (50-digit evaluation, double evaluation)\n";
  for (std::size_t i = 0; i < 5; ++i) {
    out << "  f" << i + 1 << "  " << format_real(ext[i]) << "  " << format_real(dbl[i]) << '\n';
    ok = ok && std::abs(ext[i]) <= 1e-13 && std::abs(dbl[i]) <= 1e-13;
  }
  out << (ok ? "PASS" : "FAIL") << " all residuals <= 1e-13\n";
  if (!ok)
    throw NumericalFailure("order-condition residuals exceed 1e-13");
  return kExitOk;
}

int cmd_verify_lie(std::ostream &out) {
  bool ok = true;
  for (LieCheck const &c : run_lie_checks()) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty())
      out << " | " << c.detail;
    out << '\n';
    ok = ok && c.pass;
  }
  if (!ok)
    throw NumericalFailure("lie-engine invariant suite has failures");
  return kExitOk;
}

} // namespace

std::string format_real(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_records_csv(std::ostream &os, std::vector<std::string> const &metadata,
                       std::vector<ErrorRecord> const &records) {
  for (std::string const &m : metadata)
    os << "# " << m << '\n';
  os << kCsvHeader << '\n';
  for (ErrorRecord const &r : records)
    os << r.scheme << ',' << format_real(r.h) << ',' << format_real(r.tau) << ','
       << format_real(r.epsilon) << ',' << format_real(r.t_final) << ','
       << format_real(r.e_phi) << ',' << format_real(r.e_rho) << ',' << format_real(r.e_J)
       << ',' << format_real(r.mass_drift) << ',' << format_real(r.wall_time) << ','
       << format_real(r.rate) << '\n';
}

void write_sweep_table(std::ostream &os, std::vector<std::string> const &metadata,
                       SweepResult const &r) {
  for (std::string const &m : metadata)
    os << "# " << m << '\n';
  os << "epsilon";
  for (double t : r.taus)
    os << ",tau=" << format_real(t);
  os << '\n';
  for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
    os << format_real(r.epsilons[i]);
    for (double e : r.errors[i])
      os << ',' << format_real(e);
    os << '\n';
  }
  os << "max";
  for (double e : r.column_max)
    os << ',' << format_real(e);
  os << "\nrate,nan";
  for (double v : r.rates)
    os << ',' << format_real(v);
  os << '\n';
}

void write_gnuplot_script(std::ostream &os, std::string const &csv_path,
                          std::string const &x_column, std::string const &title) {
  int const xcol = x_column == "h" ? 2 : 3;
  os << "# gnuplot >= 5\n"
     << "datafile = '" << csv_path << "'\n"
     << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set logscale xy\n"
     << "set format y '%.0e'\n"
     << "set key left top\n"
     << "set xlabel '" << x_column << "'\n"
     << "set ylabel 'error'\n"
     << "set title '" << title << "'\n"
     << "stats datafile using " << xcol << ":6 nooutput\n"
     << "x0 = STATS_max_x\n"
     << "y0 = STATS_max_y\n"
     << "guide(x, p) = y0 * (x / x0)**p\n"
     << "plot datafile using " << xcol << ":6 with linespoints title 'e_phi', \\\n"
     << "     datafile using " << xcol << ":7 with linespoints title 'e_rho', \\\n"
     << "     datafile using " << xcol << ":8 with linespoints title 'e_J', \\\n"
     << "     guide(x, 2) dashtype 2 title 'slope 2', \\\n"
     << "     guide(x, 4) dashtype 2 title 'slope 4', \\\n"
     << "     guide(x, 6) dashtype 2 title 'slope 6'\n";
}

int run_cli(int argc, char const *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Splitting-method solver for the Dirac equation with electric potentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DIRAC6C_VERSION));

  std::string config_path, csv_path, gnuplot_path, dump_path, layout = "records";
  auto add_config = [&](CLI::App *sub) {
    sub->add_option("-c,--config", config_path, "run configuration file")->required();
    sub->add_option("--csv", csv_path, "CSV output path (overrides output.csv)");
  };

  auto *solve = app.add_subcommand("solve", "evolve to t_final and print a summary line");
  add_config(solve);
  solve->add_option("--dump", dump_path, "final-state dump path (overrides output.dump)");

  auto *ctime = app.add_subcommand("converge-time", "temporal convergence table");
  add_config(ctime);
  ctime->add_option("--gnuplot", gnuplot_path, "write a gnuplot script");

  auto *cspace = app.add_subcommand("converge-space", "spatial convergence table");
  add_config(cspace);
  cspace->add_option("--gnuplot", gnuplot_path, "write a gnuplot script");

  auto *sres = app.add_subcommand("superres", "super-resolution sweep over epsilon and tau");
  add_config(sres);
  sres->add_option("--gnuplot", gnuplot_path, "write a gnuplot script");
  sres->add_option("--layout", layout, "records | table")
      ->check(CLI::IsMember({"records", "table"}));

  auto *coeffs = app.add_subcommand("coeffs", "derive or verify the S6c coefficients");
  bool derive = false, verify = false;
  std::string constants_out;
  int starts = 0;
  std::uint64_t seed = 1;
  auto *o_derive = coeffs->add_flag("--derive", derive, "solve the order conditions");
  auto *o_verify = coeffs->add_flag("--verify", verify, "check the tabulated constants");
  o_derive->excludes(o_verify);
  coeffs->add_option("--out", constants_out, "constants file written by --derive");
  coeffs->add_option("--starts", starts, "additional random Newton starts in [-3,3]^5")
      ->check(CLI::NonNegativeNumber);
  coeffs->add_option("--seed", seed, "seed for --starts");

  auto *opcount = app.add_subcommand("opcount", "number of T and W flows per step");
  std::string scheme_name;
  opcount->add_option("scheme", scheme_name, "scheme name")->required();

  auto *verify_lie = app.add_subcommand("verify-lie", "run the commutator-algebra checks");
  auto *schema = app.add_subcommand("schema", "print every configuration key");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    auto load = [&]() {
      RunConfig cfg = load_config(config_path);
      if (!csv_path.empty())
        cfg.csv = csv_path;
      if (!gnuplot_path.empty())
        cfg.gnuplot = gnuplot_path;
      if (!dump_path.empty())
        cfg.dump = dump_path;
      return cfg;
    };
    if (solve->parsed())
      return cmd_solve(load(), out);
    if (ctime->parsed())
      return cmd_converge_time(load(), out, err);
    if (cspace->parsed())
      return cmd_converge_space(load(), out);
    if (sres->parsed())
      return cmd_superres(load(), layout, out);
    if (coeffs->parsed()) {
      if (!derive && !verify) {
        err << "coeffs: one of --derive or --verify is required\n";
        return kExitValidation;
      }
      return derive ? cmd_coeffs_derive(constants_out, starts, seed, out)
                    : cmd_coeffs_verify(out);
    }
    if (opcount->parsed()) {
      SchemeSpec const s = catalog(scheme_name);
      OpCount const c = op_count(s);
      out << "T=" << c.t << " W=" << c.w << '\n';
      if (!s.note.empty())
        err << "note: " << s.note << '\n';
      return kExitOk;
    }
    if (verify_lie->parsed())
      return cmd_verify_lie(out);
    if (schema->parsed()) {
      out << config_schema_text();
      return kExitOk;
    }
  } catch (ConfigError const &e) {
    err << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (NumericalFailure const &e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (std::invalid_argument const &e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (std::out_of_range const &e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (std::exception const &e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}

} // namespace dirac6c
