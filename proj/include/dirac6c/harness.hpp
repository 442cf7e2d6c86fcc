#ifndef DIRAC6C_HARNESS_HPP
#define DIRAC6C_HARNESS_HPP

#include "dirac6c/model.hpp"
#include "dirac6c/polynomial.hpp"
#include "dirac6c/schemes.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dirac6c {

/// A fully named physical setup. Everything that influences a solution is
/// stored here by value so it can be hashed for the reference cache.
struct ProblemConfig {
  int dim = 1;
  double delta = 1.0;
  double nu = 1.0;
  double epsilon = 1.0;
  double a = -16.0;  // same interval on every axis
  double b = 16.0;
  int M = 512;
  /// "rational" ((1-x)/(1+x^2)), "honeycomb", "zero" or "constant".
  std::string potential = "rational";
  ThetaMode theta = ThetaMode::Constant;
  double potential_value = 0.0;  // for "constant"
  GaussianIC ic{};
  double t_final = 1.0;

  PhysParams params() const { return {delta, nu, epsilon}; }
  Grid grid() const { return grid_with(M); }
  Grid grid_with(int m) const { return make_grid(dim, a, b, m); }
  Potential make_potential() const;
  SpinorField initial(Grid const &g) const { return gaussian_ic(g, ic); }
  /// Canonical text used for hashing and config echo.
  std::string canonical() const;
  void validate() const;
};

/// Honeycomb setup on (-8,8)^2, h = 1/8, t_final = 1, delta = nu = eps = 1.
ProblemConfig desk_honeycomb(ThetaMode mode = ThetaMode::Constant);
/// Rational potential, 1D, (-16,16), h = 1/16.
ProblemConfig desk_rational_1d(double epsilon = 1.0);

struct ReferenceProtocol {
  std::string scheme = "S6c";
  double tau = 1e-3;
  /// Reference grid size; 0 means the problem's own grid.
  int M = 0;
};

struct RunOptions {
  int workers = 1;
  /// Empty disables the on-disk cache.
  std::string cache_dir;
};

/// DIRAC6C_CACHE_DIR if set, otherwise empty.
std::string default_cache_dir();

struct ErrorRecord {
  std::string scheme;
  double h = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  double t_final = 0.0;
  double e_phi = 0.0;
  double e_rho = 0.0;
  double e_J = 0.0;
  double mass_drift = 0.0;
  double wall_time = 0.0;
  /// Convergence rate against the previous record; NaN for the first.
  double rate = 0.0;
};

struct ErrorTriple {
  double e_phi = 0.0;
  double e_rho = 0.0;
  double e_J = 0.0;
};

ErrorTriple error_metrics(SpinorField const &numeric, SpinorField const &reference);

/// Samples a field on a coarser grid whose nodes are a subset of the
/// field's nodes (same domain, M_fine a multiple of M_coarse).
SpinorField restrict_to(SpinorField const &fine, Grid const &coarse);

/// Number of steps n with n * tau == t_final; throws if not an integer.
long step_count(double t_final, double tau);

/// Evolves the initial condition to t_final with one scheme.
struct Propagation {
  SpinorField field;
  double wall_time = 0.0;
};
Propagation propagate(ProblemConfig const &problem, Grid const &grid,
                      SchemeSpec const &scheme, double tau);

/// Content hash (16 hex digits) of problem + protocol + format version.
std::string reference_key(ProblemConfig const &problem, ReferenceProtocol const &protocol);

/// Evolves with the reference protocol. Cached on disk under
/// options.cache_dir when set; access is serialised per key.
SpinorField reference_solution(ProblemConfig const &problem,
                               ReferenceProtocol const &protocol,
                               RunOptions const &options = {});

/// Writes/reads a cached reference. read returns nullopt on any mismatch.
void write_reference_file(std::string const &path, SpinorField const &field,
                          ProblemConfig const &problem,
                          ReferenceProtocol const &protocol);
std::optional<SpinorField> read_reference_file(std::string const &path,
                                               ProblemConfig const &problem,
                                               ReferenceProtocol const &protocol);

/// e_phi between the protocol's reference and the same protocol at tau/2.
double reference_self_error(ProblemConfig const &problem,
                            ReferenceProtocol const &protocol,
                            RunOptions const &options = {});

struct OrderFit {
  std::optional<double> order;  // nullopt: saturated
  int points_used = 0;
};
/// Least-squares slope of log e vs log tau over points with e > floor;
/// needs at least three such points.
OrderFit fit_order(std::vector<double> const &taus, std::vector<double> const &errors,
                   double floor);

struct ConvergenceStudy {
  std::vector<ErrorRecord> records;
  double floor = 0.0;  // 10x reference self-convergence error
  OrderFit fit_phi, fit_rho, fit_J;
  bool saturated() const { return !fit_phi.order.has_value(); }
};

/// Errors at each tau against the reference; tau list in any order,
/// records returned by decreasing tau.
ConvergenceStudy temporal_convergence(std::string const &scheme,
                                      std::vector<double> taus,
                                      ProblemConfig const &problem,
                                      ReferenceProtocol const &protocol,
                                      RunOptions const &options = {});

/// Errors for each grid size M at fixed tau (= protocol.tau) against the
/// reference on protocol.M. rate holds the successive error ratio.
ConvergenceStudy spatial_convergence(std::string const &scheme,
                                     std::vector<int> sizes,
                                     ProblemConfig const &problem,
                                     ReferenceProtocol const &protocol,
                                     RunOptions const &options = {});

enum class Resonance { Resonant, Nonresonant };

/// Super-resolution sweep. Step sizes are kept as exact rationals times a
/// unit (pi in resonant mode, 1 otherwise).
struct SweepSpec {
  Resonance mode = Resonance::Resonant;
  Rational tau0 = 1;  // in units of the mode's unit
  int factor = 4;
  int refinements = 4;
  std::vector<Rational> epsilons;  // rows
  std::string scheme = "S6c";
  std::string reference_scheme = "S6c";
  /// Reference step per epsilon: min(ref_tau_max, ref_eps2_ratio * eps^2,
  /// tau_min / 8), rounded down to divide t_final.
  double ref_tau_max = 1e-3;
  double ref_eps2_ratio = 1.0 / 32.0;

  double unit() const;
  std::vector<Rational> tau_units() const;  // tau_k / unit
  std::vector<double> taus() const;
  /// Throws std::invalid_argument on structural problems or, in resonant
  /// mode, on a step that is not an integer multiple of eps^2 pi for some
  /// epsilon in the list.
  void validate() const;
};

struct SweepResult {
  std::vector<double> taus;
  std::vector<double> epsilons;
  std::vector<std::vector<double>> errors;  // [eps][tau]
  std::vector<double> column_max;
  std::vector<double> rates;  // size taus-1
  std::vector<ErrorRecord> records;
};

/// problem supplies domain, grid, potential, IC and t_final; epsilon is
/// overridden per row.
SweepResult superres_sweep(SweepSpec const &spec, ProblemConfig const &problem,
                           RunOptions const &options = {});

/// |mass(n) - mass(0)| / mass(0) for n = 1..n_steps.
std::vector<double> mass_series(std::string const &scheme, ProblemConfig const &problem,
                                double tau, long n_steps);

/// Runs fn(0..n-1) on up to `workers` threads; rethrows the first failure.
void parallel_for(std::size_t n, int workers, std::function<void(std::size_t)> const &fn);

} // namespace dirac6c

#endif
