#ifndef DIRAC6C_MODEL_HPP
#define DIRAC6C_MODEL_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dirac6c {

using cplx = std::complex<double>;
using Spinor = std::array<cplx, 2>;

/// Dimensionless parameters (delta, nu, epsilon) of the Dirac equation,
/// each restricted to (0, 1].
class PhysParams {
public:
  PhysParams(double delta, double nu, double epsilon);

  double delta() const { return delta_; }
  double nu() const { return nu_; }
  double epsilon() const { return epsilon_; }

  friend bool operator==(PhysParams const &, PhysParams const &) = default;

private:
  double delta_;
  double nu_;
  double epsilon_;
};

struct Axis {
  double a = 0.0;
  double b = 1.0;
  int M = 2;

  double h() const { return (b - a) / M; }
  double node(int j) const { return a + j * h(); }

  friend bool operator==(Axis const &, Axis const &) = default;
};

/// Uniform periodic grid on a box. The node x_M coincides with x_0 and is
/// never stored, so each axis carries M values.
///
/// 2D fields are stored row-major over (x index j, y index l): the flat index
/// is j * M_y + l. Use index() rather than computing offsets by hand.
class Grid {
public:
  Grid(int dim, std::array<Axis, 2> axes);

  int dim() const { return dim_; }
  Axis const &axis(int k) const { return axes_[k]; }
  double h(int k = 0) const { return axes_[k].h(); }
  /// Product of the spacings, the quadrature weight of one node.
  double cell_volume() const;
  std::size_t size() const;

  std::size_t index(int j, int l = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(j)
                     : static_cast<std::size_t>(j) * axes_[1].M + l;
  }
  /// Coordinates of the node at flat index i (y = 0 in 1D).
  std::array<double, 2> coords(std::size_t i) const;

  friend bool operator==(Grid const &, Grid const &) = default;

private:
  int dim_;
  std::array<Axis, 2> axes_;
};

Grid make_grid(int dim, double a, double b, int M);

/// Periodic grid of two-component spinors. Values are interleaved:
/// component k of node i lives at data()[2 * i + k].
class SpinorField {
public:
  explicit SpinorField(Grid grid);
  SpinorField(Grid grid, std::vector<cplx> values);

  Grid const &grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  Spinor at(std::size_t i) const { return {values_[2 * i], values_[2 * i + 1]}; }
  void set(std::size_t i, Spinor const &s) {
    values_[2 * i] = s[0];
    values_[2 * i + 1] = s[1];
  }
  cplx &component(std::size_t i, int k) { return values_[2 * i + k]; }
  cplx component(std::size_t i, int k) const { return values_[2 * i + k]; }

  std::span<cplx> data() { return values_; }
  std::span<cplx const> data() const { return values_; }

  bool all_finite() const;
  SpinorField &operator*=(cplx s);

private:
  Grid grid_;
  std::vector<cplx> values_;
};

double mass(SpinorField const &field);

/// Initial data with one Gaussian per component:
/// phi_k(x) = exp(-|x - c_k|^2 / 2).
struct GaussianIC {
  std::array<std::array<double, 2>, 2> centers{};
};

SpinorField gaussian_ic(Grid const &grid, GaussianIC const &ic);

enum class PotentialKind { Analytic, Honeycomb, CustomSampled };
enum class ThetaMode { Constant, Linear, Cosine };

ThetaMode parse_theta_mode(std::string const &name);
std::string to_string(ThetaMode mode);

/// Real electric potential V(t, x). Pure function of its arguments.
class Potential {
public:
  using Sampler = std::function<double(double t, double x, double y)>;
  using Slice = std::function<double(double x, double y)>;
  /// Optional fast path: builds the spatial profile at one time, hoisting
  /// work that depends on t only. Must agree bitwise with the sampler.
  using Slicer = std::function<Slice(double t)>;

  Potential(PotentialKind kind, Sampler sampler, bool time_independent,
            std::string description, Slicer slicer = {});

  double operator()(double t, double x, double y = 0.0) const {
    return sampler_(t, x, y);
  }
  /// x, y -> V(t, x, y) for fixed t.
  Slice at(double t) const;
  PotentialKind kind() const { return kind_; }
  bool time_independent() const { return time_independent_; }
  /// Canonical text identifying the potential; used in cache keys.
  std::string const &description() const { return description_; }
  bool is_zero() const { return zero_; }

  static Potential zero();
  static Potential constant(double value);

private:
  PotentialKind kind_;
  Sampler sampler_;
  Slicer slicer_;
  bool time_independent_;
  std::string description_;
  bool zero_ = false;
};

/// V(t, x) = sum_k cos(4 pi / sqrt(3) e_k(t) . x), e_k rotated by theta(t).
Potential honeycomb_potential(ThetaMode mode);
Potential honeycomb_potential(std::string const &mode_name);
double honeycomb_theta(ThetaMode mode, double t);

/// V(x) = (1 - x) / (1 + x^2), the nonrelativistic-regime test potential.
Potential rational_potential_1d();

/// Tabulated values on a grid, looked up at the nearest node (periodic).
Potential sampled_potential(Grid const &grid, std::vector<double> values);

} // namespace dirac6c

#endif
