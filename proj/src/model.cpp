#include "dirac6c/model.hpp"
#include "dirac6c/hash.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dirac6c {

namespace {

void require_unit_interval(double v, char const *name) {
  if (!(v > 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in (0,1], got " << v;
    throw std::invalid_argument(os.str());
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

} // namespace

PhysParams::PhysParams(double delta, double nu, double epsilon)
    : delta_(delta), nu_(nu), epsilon_(epsilon) {
  require_unit_interval(delta, "delta");
  require_unit_interval(nu, "nu");
  require_unit_interval(epsilon, "epsilon");
}

Grid::Grid(int dim, std::array<Axis, 2> axes) : dim_(dim), axes_(axes) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("grid dimension must be 1 or 2");
  for (int k = 0; k < dim; ++k) {
    Axis const &ax = axes_[k];
    if (!(ax.a < ax.b))
      throw std::invalid_argument("grid requires a < b");
    if (ax.M < 2 || ax.M % 2 != 0)
      throw std::invalid_argument("M must be even and >= 2");
  }
  if (dim == 1)
    axes_[1] = Axis{};
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim_; ++k)
    v *= axes_[k].h();
  return v;
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int k = 0; k < dim_; ++k)
    n *= static_cast<std::size_t>(axes_[k].M);
  return n;
}

std::array<double, 2> Grid::coords(std::size_t i) const {
  if (dim_ == 1)
    return {axes_[0].node(static_cast<int>(i)), 0.0};
  auto const My = static_cast<std::size_t>(axes_[1].M);
  return {axes_[0].node(static_cast<int>(i / My)),
          axes_[1].node(static_cast<int>(i % My))};
}

Grid make_grid(int dim, double a, double b, int M) {
  Axis ax{a, b, M};
  return Grid(dim, {ax, ax});
}

SpinorField::SpinorField(Grid grid)
    : grid_(std::move(grid)), values_(2 * grid_.size(), cplx{0.0, 0.0}) {}

SpinorField::SpinorField(Grid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != 2 * grid_.size())
    throw std::invalid_argument("spinor value count does not match grid");
}

bool SpinorField::all_finite() const {
  for (cplx const &z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      return false;
  return true;
}

SpinorField &SpinorField::operator*=(cplx s) {
  for (cplx &z : values_)
    z *= s;
  return *this;
}

double mass(SpinorField const &field) {
  double sum = 0.0;
  for (cplx const &z : field.data())
    sum += std::norm(z);
  return field.grid().cell_volume() * sum;
}

SpinorField gaussian_ic(Grid const &grid, GaussianIC const &ic) {
  SpinorField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto const x = grid.coords(i);
    for (int k = 0; k < 2; ++k) {
      double r2 = 0.0;
      for (int d = 0; d < grid.dim(); ++d) {
        double const dx = x[d] - ic.centers[k][d];
        r2 += dx * dx;
      }
      f.component(i, k) = std::exp(-0.5 * r2);
    }
  }
  return f;
}

ThetaMode parse_theta_mode(std::string const &name) {
  if (name == "constant")
    return ThetaMode::Constant;
  if (name == "linear")
    return ThetaMode::Linear;
  if (name == "cosine")
    return ThetaMode::Cosine;
  throw std::invalid_argument("unknown theta mode '" + name +
                              "' (expected constant, linear or cosine)");
}

std::string to_string(ThetaMode mode) {
  switch (mode) {
  case ThetaMode::Constant:
    return "constant";
  case ThetaMode::Linear:
    return "linear";
  case ThetaMode::Cosine:
    return "cosine";
  }
  return "?";
}

Potential::Potential(PotentialKind kind, Sampler sampler,
                     bool time_independent, std::string description,
                     Slicer slicer)
    : kind_(kind), sampler_(std::move(sampler)), slicer_(std::move(slicer)),
      time_independent_(time_independent),
      description_(std::move(description)) {}

Potential::Slice Potential::at(double t) const {
  if (slicer_)
    return slicer_(t);
  return [this, t](double x, double y) { return sampler_(t, x, y); };
}

Potential Potential::zero() {
  Potential p(
      PotentialKind::Analytic, [](double, double, double) { return 0.0; },
      true, "zero");
  p.zero_ = true;
  return p;
}

Potential Potential::constant(double value) {
  if (value == 0.0)
    return zero();
  return Potential(
      PotentialKind::Analytic,
      [value](double, double, double) { return value; }, true,
      "constant:" + format_double(value));
}

double honeycomb_theta(ThetaMode mode, double t) {
  using std::numbers::pi;
  switch (mode) {
  case ThetaMode::Constant:
    return pi;
  case ThetaMode::Linear:
    return pi + pi * t;
  case ThetaMode::Cosine:
    return pi + pi * std::cos(pi * t);
  }
  return pi;
}

namespace {

// Wave vectors of the three plane waves at one time.
struct HoneycombSlice {
  std::array<double, 3> kx, ky;

  HoneycombSlice(ThetaMode mode, double t) {
    using std::numbers::pi;
    double const k = 4.0 * pi / std::sqrt(3.0);
    double const theta = honeycomb_theta(mode, t);
    for (int j = 0; j < 3; ++j) {
      double const angle = theta + 2.0 * pi * j / 3.0;
      kx[j] = k * std::cos(angle);
      ky[j] = k * std::sin(angle);
    }
  }

  double operator()(double x, double y) const {
    double v = 0.0;
    for (int j = 0; j < 3; ++j)
      v += std::cos(kx[j] * x + ky[j] * y);
    return v;
  }
};

} // namespace

Potential honeycomb_potential(ThetaMode mode) {
  return Potential(
      PotentialKind::Honeycomb,
      [mode](double t, double x, double y) { return HoneycombSlice(mode, t)(x, y); },
      mode == ThetaMode::Constant, "honeycomb:" + to_string(mode),
      [mode](double t) -> Potential::Slice { return HoneycombSlice(mode, t); });
}

Potential honeycomb_potential(std::string const &mode_name) {
  return honeycomb_potential(parse_theta_mode(mode_name));
}

Potential rational_potential_1d() {
  return Potential(
      PotentialKind::Analytic,
      [](double, double x, double) { return (1.0 - x) / (1.0 + x * x); },
      true, "rational1d");
}

Potential sampled_potential(Grid const &grid, std::vector<double> values) {
  if (values.size() != grid.size())
    throw std::invalid_argument("sampled potential needs one value per node");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("sampled potential values must be finite");

  Fnv1a hash;
  for (double v : values)
    hash.update(v);
  std::string desc = "sampled:" + hash.hex();

  auto table = std::make_shared<std::vector<double> const>(std::move(values));
  auto sampler = [grid, table](double, double x, double y) {
    auto nearest = [](Axis const &ax, double c) {
      long j = std::lround((c - ax.a) / ax.h());
      j %= ax.M;
      if (j < 0)
        j += ax.M;
      return static_cast<int>(j);
    };
    int const j = nearest(grid.axis(0), x);
    int const l = grid.dim() == 2 ? nearest(grid.axis(1), y) : 0;
    return (*table)[grid.index(j, l)];
  };
  return Potential(PotentialKind::CustomSampled, sampler, true, desc);
}

} // namespace dirac6c
