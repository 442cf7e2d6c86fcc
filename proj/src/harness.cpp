#include "dirac6c/harness.hpp"

#include "dirac6c/hash.hpp"
#include "dirac6c/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dirac6c {

namespace {

constexpr int kReferenceFormatVersion = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(Rational const &r) { return r.convert_to<double>(); }

std::mutex &key_mutex(std::string const &key) {
  static std::mutex guard;
  static std::map<std::string, std::unique_ptr<std::mutex>> locks;
  std::lock_guard lock(guard);
  auto &slot = locks[key];
  if (!slot)
    slot = std::make_unique<std::mutex>();
  return *slot;
}

double relative_drift(double m, double m0) {
  return m0 == 0.0 ? 0.0 : std::abs(m - m0) / m0;
}

} // namespace

Potential ProblemConfig::make_potential() const {
  if (potential == "rational")
    return rational_potential_1d();
  if (potential == "honeycomb")
    return honeycomb_potential(theta);
  if (potential == "zero")
    return Potential::zero();
  if (potential == "constant")
    return Potential::constant(potential_value);
  throw std::invalid_argument("unknown potential '" + potential + "'");
}

std::string ProblemConfig::canonical() const {
  std::ostringstream os;
  os << "dim=" << dim << ";delta=" << fmt(delta) << ";nu=" << fmt(nu)
     << ";epsilon=" << fmt(epsilon) << ";a=" << fmt(a) << ";b=" << fmt(b)
     << ";M=" << M << ";potential=" << potential;
  if (potential == "honeycomb")
    os << ";theta=" << to_string(theta);
  if (potential == "constant")
    os << ";value=" << fmt(potential_value);
  os << ";ic=";
  for (auto const &c : ic.centers)
    os << fmt(c[0]) << ',' << fmt(c[1]) << ',';
  os << ";t_final=" << fmt(t_final);
  return os.str();
}

void ProblemConfig::validate() const {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("dim must be 1 or 2");
  (void)params();
  (void)grid();
  (void)make_potential();
  if (potential == "rational" && dim != 1)
    throw std::invalid_argument("the rational potential is one-dimensional");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("t_final must be positive");
}

ProblemConfig desk_honeycomb(ThetaMode mode) {
  ProblemConfig p;
  p.dim = 2;
  p.a = -8.0;
  p.b = 8.0;
  p.M = 128;
  p.potential = "honeycomb";
  p.theta = mode;
  p.ic.centers = {{{0.0, 0.0}, {1.0, 0.0}}};
  p.t_final = 1.0;
  return p;
}

ProblemConfig desk_rational_1d(double epsilon) {
  ProblemConfig p;
  p.dim = 1;
  p.epsilon = epsilon;
  p.a = -16.0;
  p.b = 16.0;
  p.M = 512;
  p.potential = "rational";
  p.ic.centers = {{{0.0, 0.0}, {1.0, 0.0}}};
  p.t_final = 1.0;
  return p;
}

std::string default_cache_dir() {
  char const *env = std::getenv("DIRAC6C_CACHE_DIR");
  return env ? std::string(env) : std::string();
}

ErrorTriple error_metrics(SpinorField const &numeric, SpinorField const &reference) {
  if (!(numeric.grid() == reference.grid()))
    throw std::invalid_argument("error metrics need fields on the same grid");
  double s_phi = 0.0, s_rho = 0.0, s_j = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    Spinor const u = numeric.at(i);
    Spinor const v = reference.at(i);
    s_phi += std::norm(u[0] - v[0]) + std::norm(u[1] - v[1]);
    double const rho_u = std::norm(u[0]) + std::norm(u[1]);
    double const rho_v = std::norm(v[0]) + std::norm(v[1]);
    s_rho += (rho_u - rho_v) * (rho_u - rho_v);
    // J_1 = 2 Re(conj(p1) p2), J_2 = 2 Im(conj(p1) p2)
    cplx const ju = 2.0 * std::conj(u[0]) * u[1];
    cplx const jv = 2.0 * std::conj(v[0]) * v[1];
    double const d1 = ju.real() - jv.real();
    s_j += d1 * d1;
    if (numeric.grid().dim() == 2) {
      double const d2 = ju.imag() - jv.imag();
      s_j += d2 * d2;
    }
  }
  double const w = numeric.grid().cell_volume();
  return {std::sqrt(w * s_phi), std::sqrt(w * s_rho), std::sqrt(w * s_j)};
}

SpinorField restrict_to(SpinorField const &fine, Grid const &coarse) {
  Grid const &g = fine.grid();
  if (g.dim() != coarse.dim())
    throw std::invalid_argument("restriction needs equal dimensions");
  std::array<int, 2> stride{1, 1};
  for (int k = 0; k < g.dim(); ++k) {
    Axis const &f = g.axis(k);
    Axis const &c = coarse.axis(k);
    if (f.a != c.a || f.b != c.b || f.M % c.M != 0)
      throw std::invalid_argument("coarse grid nodes are not a subset of the fine grid");
    stride[static_cast<std::size_t>(k)] = f.M / c.M;
  }
  SpinorField out(coarse);
  int const my = coarse.dim() == 2 ? coarse.axis(1).M : 1;
  for (int j = 0; j < coarse.axis(0).M; ++j)
    for (int l = 0; l < my; ++l)
      out.set(coarse.index(j, l), fine.at(g.index(j * stride[0], l * stride[1])));
  return out;
}

long step_count(double t_final, double tau) {
  if (!(tau > 0.0) || !(t_final >= 0.0))
    throw std::invalid_argument("step size must be positive");
  double const n = t_final / tau;
  long const r = std::lround(n);
  if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("t_final " + fmt(t_final) + " is not a multiple of tau " +
                                fmt(tau));
  return r;
}

Propagation propagate(ProblemConfig const &problem, Grid const &grid,
                      SchemeSpec const &scheme, double tau) {
  long const n = step_count(problem.t_final, tau);
  SpectralCache const cache(problem.params(), grid);
  Stepper stepper(scheme, cache, problem.make_potential(), tau);
  SpinorField field = problem.initial(grid);
  auto const t0 = std::chrono::steady_clock::now();
  stepper.evolve(field, 0.0, n);
  auto const t1 = std::chrono::steady_clock::now();
  if (!field.all_finite())
    throw std::runtime_error("non-finite values after propagation");
  return {std::move(field), std::chrono::duration<double>(t1 - t0).count()};
}

std::string reference_key(ProblemConfig const &problem, ReferenceProtocol const &protocol) {
  Fnv1a h;
  h.update("dirac6c-reference v" + std::to_string(kReferenceFormatVersion));
  h.update(problem.canonical());
  h.update(";ref_scheme=" + protocol.scheme + ";ref_tau=" + fmt(protocol.tau) +
           ";ref_M=" + std::to_string(protocol.M ? protocol.M : problem.M));
  return h.hex();
}

void write_reference_file(std::string const &path, SpinorField const &field,
                          ProblemConfig const &problem,
                          ReferenceProtocol const &protocol) {
  std::string const tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write cache file " + tmp);
    Grid const &g = field.grid();
    out << "dirac6c-reference\n"
        << "version " << kReferenceFormatVersion << '\n'
        << "hash " << reference_key(problem, protocol) << '\n'
        << "grid " << g.dim() << ' ' << fmt(g.axis(0).a) << ' ' << fmt(g.axis(0).b)
        << ' ' << g.axis(0).M << ' ' << g.axis(1).M << '\n'
        << "params " << fmt(problem.delta) << ' ' << fmt(problem.nu) << ' '
        << fmt(problem.epsilon) << '\n'
        << "protocol " << protocol.scheme << ' ' << fmt(protocol.tau) << ' '
        << fmt(problem.t_final) << '\n'
        << "values " << field.data().size() << '\n';
    out.write(reinterpret_cast<char const *>(field.data().data()),
              static_cast<std::streamsize>(field.data().size() * sizeof(cplx)));
    if (!out)
      throw std::runtime_error("failed writing cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<SpinorField> read_reference_file(std::string const &path,
                                               ProblemConfig const &problem,
                                               ReferenceProtocol const &protocol) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::string line, tag;
  std::getline(in, line);
  if (line != "dirac6c-reference")
    return std::nullopt;
  int version = 0;
  std::string hash;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "version")
      ls >> version;
    else if (tag == "hash")
      ls >> hash;
    else if (tag == "values") {
      ls >> count;
      break;
    }
  }
  if (version != kReferenceFormatVersion || hash != reference_key(problem, protocol))
    return std::nullopt;
  Grid const grid = problem.grid_with(protocol.M ? protocol.M : problem.M);
  if (count != 2 * grid.size())
    return std::nullopt;
  std::vector<cplx> values(count);
  in.read(reinterpret_cast<char *>(values.data()),
          static_cast<std::streamsize>(count * sizeof(cplx)));
  if (!in)
    return std::nullopt;
  return SpinorField(grid, std::move(values));
}

SpinorField reference_solution(ProblemConfig const &problem,
                               ReferenceProtocol const &protocol,
                               RunOptions const &options) {
  std::string const key = reference_key(problem, protocol);
  std::lock_guard lock(key_mutex(key));
  std::string path;
  if (!options.cache_dir.empty()) {
    std::filesystem::create_directories(options.cache_dir);
    path = (std::filesystem::path(options.cache_dir) / (key + ".ref")).string();
    if (auto cached = read_reference_file(path, problem, protocol))
      return std::move(*cached);
  }
  Grid const grid = problem.grid_with(protocol.M ? protocol.M : problem.M);
  SpinorField field = propagate(problem, grid, catalog(protocol.scheme), protocol.tau).field;
  if (!path.empty())
    write_reference_file(path, field, problem, protocol);
  return field;
}

double reference_self_error(ProblemConfig const &problem,
                            ReferenceProtocol const &protocol,
                            RunOptions const &options) {
  ReferenceProtocol half = protocol;
  half.tau = protocol.tau / 2.0;
  SpinorField const a = reference_solution(problem, protocol, options);
  SpinorField const b = reference_solution(problem, half, options);
  return error_metrics(a, b).e_phi;
}

OrderFit fit_order(std::vector<double> const &taus, std::vector<double> const &errors,
                   double floor) {
  if (taus.size() != errors.size())
    throw std::invalid_argument("fit_order: size mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (errors[i] > floor && errors[i] > 0.0)
      pts.emplace_back(std::log(taus[i]), std::log(errors[i]));
  OrderFit fit;
  fit.points_used = static_cast<int>(pts.size());
  if (pts.size() < 3)
    return fit;
  double mx = 0.0, my = 0.0;
  for (auto const &[x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (auto const &[x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0.0)
    return fit;
  fit.order = sxy / sxx;
  return fit;
}

ConvergenceStudy temporal_convergence(std::string const &scheme,
                                      std::vector<double> taus,
                                      ProblemConfig const &problem,
                                      ReferenceProtocol const &protocol,
                                      RunOptions const &options) {
  if (taus.size() < 3)
    throw std::invalid_argument("temporal convergence needs at least three step sizes");
  std::sort(taus.begin(), taus.end(), std::greater<>());
  if (!(protocol.tau * 8.0 <= taus.back() * (1.0 + 1e-12)))
    throw std::invalid_argument("reference step must be at least 8x smaller than the "
                                "smallest study step");
  if (protocol.M != 0 && protocol.M != problem.M)
    throw std::invalid_argument("temporal convergence uses the study grid for the reference");
  problem.validate();
  SchemeSpec const spec = catalog(scheme);
  for (double tau : taus)
    (void)step_count(problem.t_final, tau);

  ConvergenceStudy study;
  study.floor = 10.0 * reference_self_error(problem, protocol, options);
  SpinorField const ref = reference_solution(problem, protocol, options);
  Grid const grid = problem.grid();
  double const m0 = mass(problem.initial(grid));

  study.records.resize(taus.size());
  parallel_for(taus.size(), options.workers, [&](std::size_t i) {
    Propagation const run = propagate(problem, grid, spec, taus[i]);
    ErrorTriple const e = error_metrics(run.field, ref);
    ErrorRecord &r = study.records[i];
    r = {spec.name, grid.h(), taus[i], problem.epsilon, problem.t_final,
         e.e_phi, e.e_rho, e.e_J, relative_drift(mass(run.field), m0), run.wall_time,
         std::nan("")};
  });

  std::vector<double> ep, er, ej;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    ErrorRecord &r = study.records[i];
    if (i > 0)
      r.rate = std::log(study.records[i - 1].e_phi / r.e_phi) /
               std::log(study.records[i - 1].tau / r.tau);
    ep.push_back(r.e_phi);
    er.push_back(r.e_rho);
    ej.push_back(r.e_J);
  }
  study.fit_phi = fit_order(taus, ep, study.floor);
  study.fit_rho = fit_order(taus, er, study.floor);
  study.fit_J = fit_order(taus, ej, study.floor);
  return study;
}

ConvergenceStudy spatial_convergence(std::string const &scheme,
                                     std::vector<int> sizes,
                                     ProblemConfig const &problem,
                                     ReferenceProtocol const &protocol,
                                     RunOptions const &options) {
  if (sizes.empty())
    throw std::invalid_argument("spatial convergence needs grid sizes");
  std::sort(sizes.begin(), sizes.end());
  int const ref_m = protocol.M ? protocol.M : problem.M;
  for (int m : sizes)
    if (m > ref_m || ref_m % m != 0)
      throw std::invalid_argument("reference grid must be a multiple of every study grid");
  problem.validate();
  SchemeSpec const spec = catalog(scheme);
  SpinorField const ref = reference_solution(problem, protocol, options);

  ConvergenceStudy study;
  study.records.resize(sizes.size());
  parallel_for(sizes.size(), options.workers, [&](std::size_t i) {
    Grid const grid = problem.grid_with(sizes[i]);
    Propagation const run = propagate(problem, grid, spec, protocol.tau);
    ErrorTriple const e = error_metrics(run.field, restrict_to(ref, grid));
    double const m0 = mass(problem.initial(grid));
    study.records[i] = {spec.name, grid.h(), protocol.tau, problem.epsilon,
                        problem.t_final, e.e_phi, e.e_rho, e.e_J,
                        relative_drift(mass(run.field), m0), run.wall_time, std::nan("")};
  });
  for (std::size_t i = 1; i < sizes.size(); ++i)
    study.records[i].rate = study.records[i - 1].e_phi / study.records[i].e_phi;
  return study;
}

double SweepSpec::unit() const {
  return mode == Resonance::Resonant ? std::numbers::pi : 1.0;
}

std::vector<Rational> SweepSpec::tau_units() const {
  std::vector<Rational> out;
  Rational t = tau0;
  for (int k = 0; k <= refinements; ++k) {
    out.push_back(t);
    t /= factor;
  }
  return out;
}

std::vector<double> SweepSpec::taus() const {
  std::vector<double> out;
  for (Rational const &q : tau_units())
    out.push_back(to_double(q) * unit());
  return out;
}

void SweepSpec::validate() const {
  if (refinements < 3)
    throw std::invalid_argument("sweep needs at least three refinements");
  if (factor < 2)
    throw std::invalid_argument("refinement factor must be at least 2");
  if (tau0 <= 0)
    throw std::invalid_argument("tau0 must be positive");
  if (epsilons.empty())
    throw std::invalid_argument("sweep needs at least one epsilon");
  for (Rational const &e : epsilons)
    if (e <= 0 || e > 1)
      throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (mode != Resonance::Resonant)
    return;
  for (Rational const &q : tau_units()) {
    bool const ok = std::any_of(epsilons.begin(), epsilons.end(), [&](Rational const &e) {
      Rational const k = q / (e * e);
      return denominator(k) == 1;
    });
    if (!ok)
      throw std::invalid_argument("resonant step " + to_string(q) +
                                  "*pi is not a multiple of eps^2*pi for any epsilon");
  }
}

SweepResult superres_sweep(SweepSpec const &spec, ProblemConfig const &problem,
                           RunOptions const &options) {
  spec.validate();
  if (problem.dim != 1)
    throw std::invalid_argument("super-resolution sweeps are one-dimensional");
  SchemeSpec const scheme = catalog(spec.scheme);
  SweepResult out;
  out.taus = spec.taus();
  for (Rational const &e : spec.epsilons)
    out.epsilons.push_back(to_double(e));
  std::size_t const ne = out.epsilons.size();
  std::size_t const nt = out.taus.size();
  for (double tau : out.taus)
    (void)step_count(problem.t_final, tau);

  // references first, one per epsilon
  std::vector<SpinorField> refs;
  for (double eps : out.epsilons) {
    ProblemConfig p = problem;
    p.epsilon = eps;
    double cand = std::min({spec.ref_tau_max, spec.ref_eps2_ratio * eps * eps,
                            out.taus.back() / 8.0});
    double const n = std::ceil(problem.t_final / cand - 1e-9);
    ReferenceProtocol const proto{spec.reference_scheme, problem.t_final / n, 0};
    refs.push_back(reference_solution(p, proto, options));
  }

  out.errors.assign(ne, std::vector<double>(nt));
  out.records.resize(ne * nt);
  Grid const grid = problem.grid();
  double const m0 = mass(problem.initial(grid));
  parallel_for(ne * nt, options.workers, [&](std::size_t job) {
    std::size_t const i = job / nt, j = job % nt;
    ProblemConfig p = problem;
    p.epsilon = out.epsilons[i];
    Propagation const run = propagate(p, grid, scheme, out.taus[j]);
    ErrorTriple const e = error_metrics(run.field, refs[i]);
    out.errors[i][j] = e.e_phi;
    out.records[job] = {scheme.name, grid.h(), out.taus[j], p.epsilon, p.t_final,
                        e.e_phi, e.e_rho, e.e_J, relative_drift(mass(run.field), m0),
                        run.wall_time, std::nan("")};
  });
  for (std::size_t j = 0; j < nt; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < ne; ++i)
      m = std::max(m, out.errors[i][j]);
    out.column_max.push_back(m);
  }
  for (std::size_t j = 1; j < nt; ++j)
    out.rates.push_back(std::log(out.column_max[j - 1] / out.column_max[j]) /
                        std::log(static_cast<double>(spec.factor)));
  for (std::size_t i = 0; i < ne; ++i)
    for (std::size_t j = 1; j < nt; ++j)
      out.records[i * nt + j].rate =
          std::log(out.errors[i][j - 1] / out.errors[i][j]) /
          std::log(static_cast<double>(spec.factor));
  return out;
}

std::vector<double> mass_series(std::string const &scheme, ProblemConfig const &problem,
                                double tau, long n_steps) {
  if (n_steps < 0)
    throw std::invalid_argument("step count must be non-negative");
  Grid const grid = problem.grid();
  SpectralCache const cache(problem.params(), grid);
  Stepper stepper(catalog(scheme), cache, problem.make_potential(), tau);
  SpinorField field = problem.initial(grid);
  double const m0 = mass(field);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_steps));
  for (long n = 0; n < n_steps; ++n) {
    stepper.step(field, static_cast<double>(n) * tau);
    out.push_back(relative_drift(mass(field), m0));
  }
  return out;
}

void parallel_for(std::size_t n, int workers,
                  std::function<void(std::size_t)> const &fn) {
  std::size_t const nw =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace dirac6c
