#ifndef DIRAC6C_SCHEMES_HPP
#define DIRAC6C_SCHEMES_HPP

#include "dirac6c/model.hpp"
#include "dirac6c/spectral.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dirac6c {

enum class OpKind { T, W };

/// One exponential factor exp(coeff * tau * op). For W steps, time_offset is
/// the fraction of tau added to t_n when the potential is evaluated.
struct SchemeStep {
  OpKind kind = OpKind::T;
  double coeff = 0.0;
  double time_offset = 0.0;
};

/// A splitting method as a program of exponential steps.
///
/// Steps are stored left to right as the operator product is written and are
/// executed right to left: the last step acts on the field first.
struct SchemeSpec {
  std::string name;
  std::vector<SchemeStep> steps;
  int declared_order = 0;
  bool symmetric = false;
  /// Free-form remark carried into reports (e.g. a cost discrepancy).
  std::string note;

  /// Throws std::logic_error if a structural invariant is violated.
  void validate() const;
};

struct OpCount {
  int t = 0;
  int w = 0;
  friend bool operator==(OpCount const &, OpCount const &) = default;
};

OpCount op_count(SchemeSpec const &spec);

/// Fuses adjacent same-kind factors and fills W time offsets with the
/// cumulative T coefficient acting before each W factor.
SchemeSpec build_scheme(std::string name,
                        std::vector<std::pair<OpKind, double>> const &factors,
                        int declared_order, bool symmetric);

/// Named decimal constants (`name = value` lines, `#` comments).
class ConstantsTable {
public:
  static ConstantsTable parse(std::string_view text);

  double value(std::string const &name) const;
  std::string const &text(std::string const &name) const;
  bool contains(std::string const &name) const;
  std::vector<std::string> names() const;

private:
  std::map<std::string, std::string> entries_;
};

/// The constants file shipped in data/scheme_constants.txt.
ConstantsTable const &builtin_constants();
std::string_view builtin_constants_text();

std::vector<std::string> catalog_names();
SchemeSpec catalog(std::string const &name);
SchemeSpec catalog(std::string const &name, ConstantsTable const &constants);

/// Executes one scheme with a fixed step size. Holds the per-coefficient
/// T-flow propagators, the transform workspace and, for time-independent
/// potentials, the W-flow phases. One instance per worker.
///
/// A negative tau runs the scheme backward in time; step() and evolve()
/// below only accept tau > 0.
class Stepper {
public:
  Stepper(SchemeSpec spec, SpectralCache const &cache, Potential potential,
          double tau);

  SchemeSpec const &spec() const { return spec_; }
  double tau() const { return tau_; }

  /// Advances field from t_n to t_n + tau.
  void step(SpinorField &field, double t_n);
  void evolve(SpinorField &field, double t0, long n_steps);

private:
  TFlow const &t_flow(double coeff);
  void apply_w(SpinorField &field, double coeff, double t_eval);

  SchemeSpec spec_;
  SpectralCache const *cache_;
  Potential potential_;
  double tau_;
  FourierTransform fft_;
  std::map<double, std::unique_ptr<TFlow>> t_flows_;
  std::map<double, std::unique_ptr<WFlowCache>> w_flows_;
};

SpinorField step(SpinorField field, double tau, double t_n,
                 SchemeSpec const &spec, Potential const &potential,
                 SpectralCache const &cache);

SpinorField evolve(SpinorField field, double tau, double t0, long n_steps,
                   SchemeSpec const &spec, Potential const &potential,
                   SpectralCache const &cache);

} // namespace dirac6c

#endif
