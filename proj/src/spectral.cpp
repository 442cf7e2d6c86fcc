#include "dirac6c/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dirac6c {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same_grid(Grid const &a, Grid const &b) {
  if (!(a == b))
    throw std::invalid_argument("field grid does not match cache grid");
}

// Rounds each component to one of its neighbouring doubles so that the
// squared norm lands as close to `target` as double storage allows. A plain
// round-to-nearest leaves a fixed bias of about one ulp, which repeated
// application of the same factor turns into linear mass drift.
// nextafter towards -inf and +inf for finite d.
std::array<double, 2> neighbours(double d) {
  if (d == 0.0)
    return {-std::numeric_limits<double>::denorm_min(),
            std::numeric_limits<double>::denorm_min()};
  auto const b = std::bit_cast<std::uint64_t>(d);
  double const away = std::bit_cast<double>(b + 1), toward = std::bit_cast<double>(b - 1);
  return d > 0 ? std::array{toward, away} : std::array{away, toward};
}

template <std::size_t N>
std::array<double, N> round_to_norm(std::array<long double, N> const &x,
                                    long double target) {
  std::array<std::array<double, 3>, N> cand;
  for (std::size_t i = 0; i < N; ++i) {
    double const d = static_cast<double>(x[i]);
    auto const [down, up] = neighbours(d);
    cand[i] = {d, down, up};
  }
  std::array<double, N> best{};
  long double best_err = HUGE_VALL;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < N; ++i)
    combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    std::array<double, N> y;
    long double n = 0.0L;
    for (std::size_t i = 0, r = c; i < N; ++i, r /= 3) {
      y[i] = cand[i][r % 3];
      n += static_cast<long double>(y[i]) * y[i];
    }
    long double const err = std::fabs(n - target);
    if (err < best_err) {
      best_err = err;
      best = y;
    }
  }
  return best;
}

cplx unit_phase(double angle) {
  auto const y = round_to_norm<2>({std::cos(angle), std::sin(angle)}, 1.0L);
  return {y[0], y[1]};
}

} // namespace

double Mat2::max_abs() const {
  return std::max({std::abs(a00), std::abs(a01), std::abs(a10), std::abs(a11)});
}

SpectralCache::SpectralCache(PhysParams params, Grid grid)
    : params_(params), grid_(std::move(grid)) {
  double const delta = params_.delta();
  double const nu = params_.nu();
  double const eps = params_.epsilon();
  double const de = delta * eps;
  double const scale = 1.0 / (delta * eps * eps);

  int const Mx = grid_.axis(0).M;
  int const My = grid_.dim() == 2 ? grid_.axis(1).M : 1;
  double const Lx = grid_.axis(0).b - grid_.axis(0).a;
  double const Ly = grid_.dim() == 2 ? grid_.axis(1).b - grid_.axis(1).a : 1.0;

  modes_.resize(grid_.size());
  for (int kx = 0; kx < Mx; ++kx) {
    for (int ky = 0; ky < My; ++ky) {
      ModeData md;
      md.mu_x = 2.0 * std::numbers::pi * signed_mode(kx, Mx) / Lx;
      md.mu_y = grid_.dim() == 2
                    ? 2.0 * std::numbers::pi * signed_mode(ky, My) / Ly
                    : 0.0;
      md.eta = std::sqrt(nu * nu +
                         de * de * (md.mu_x * md.mu_x + md.mu_y * md.mu_y));
      md.omega = md.eta * scale;
      // Eigenvectors of nu sigma_3 + delta eps (mu_x sigma_1 + mu_y sigma_2):
      // columns (eta + nu, de (mu_x + i mu_y)) and (-de (mu_x - i mu_y),
      // eta + nu). eta + nu >= 2 nu > 0, so the normalisation never vanishes.
      double const norm = 1.0 / std::sqrt(2.0 * md.eta * (md.eta + nu));
      cplx const off{de * md.mu_x, de * md.mu_y};
      md.q = {norm * (md.eta + nu), -norm * std::conj(off), norm * off,
              norm * (md.eta + nu)};
      modes_[grid_.index(kx, ky)] = md;
    }
  }
}

ModeData const &SpectralCache::mode(int l, int m) const {
  auto wrap = [](int l, int M) {
    if (l < -M / 2 || l >= M / 2)
      throw std::out_of_range("mode index outside -M/2 .. M/2-1");
    return l < 0 ? l + M : l;
  };
  int const kx = wrap(l, grid_.axis(0).M);
  int const ky = grid_.dim() == 2 ? wrap(m, grid_.axis(1).M) : 0;
  return modes_[grid_.index(kx, ky)];
}

Mat2 SpectralCache::gamma(ModeData const &md) const {
  using namespace std::complex_literals;
  double const eps = params_.epsilon();
  double const mass_term = params_.nu() / (params_.delta() * eps * eps);
  // -(i/eps)(mu_x sigma_1 + mu_y sigma_2) - i mass_term sigma_3
  cplx const off_upper = -1i / eps * cplx{md.mu_x, -md.mu_y};
  cplx const off_lower = -1i / eps * cplx{md.mu_x, md.mu_y};
  return {-1i * mass_term, off_upper, off_lower, 1i * mass_term};
}

Mat2 SpectralCache::flow_matrix(ModeData const &md, double ctau) const {
  return flow_matrix(md, ctau, 1.0);
}

Mat2 SpectralCache::flow_matrix(ModeData const &md, double ctau,
                                double scale) const {
  // Q diag(e^{-i theta}, e^{i theta}) Q^* = cos(theta) - i sin(theta) n.sigma
  // with the unit vector n = (de mu_x, de mu_y, nu) / eta, i.e. the SU(2)
  // matrix [[a, b], [-conj(b), conj(a)]].
  using real = long double;
  real const de = static_cast<real>(params_.delta()) * params_.epsilon();
  real const theta = static_cast<real>(ctau) * md.omega;
  real const eta = std::sqrt(static_cast<real>(params_.nu()) * params_.nu() +
                             de * de *
                                 (static_cast<real>(md.mu_x) * md.mu_x +
                                  static_cast<real>(md.mu_y) * md.mu_y));
  real const c = std::cos(theta);
  real const s = std::sin(theta) / eta;
  real const k = scale;
  auto const y = round_to_norm<4>(
      {k * c, -k * s * params_.nu(), -k * s * de * md.mu_y, -k * s * de * md.mu_x},
      k * k);
  cplx const a{y[0], y[1]};
  cplx const b{y[2], y[3]};
  return {a, b, -std::conj(b), std::conj(a)};
}

SpectralCache build_cache(PhysParams const &params, Grid const &grid) {
  return SpectralCache(params, grid);
}

FourierTransform::FourierTransform(Grid const &grid) : grid_(grid) {
  std::size_t const n = grid_.size();
  buffer_ = reinterpret_cast<cplx *>(fftw_malloc(sizeof(cplx) * 2 * n));
  if (!buffer_)
    throw std::bad_alloc();
  int dims[2] = {grid_.axis(0).M, grid_.axis(1).M};
  auto *buf = reinterpret_cast<fftw_complex *>(buffer_);

  // Estimated plans are reproducible; the scalar codelets drift less in mass.
  unsigned const flags = FFTW_ESTIMATE | FFTW_NO_SIMD;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft(grid_.dim(), dims, 2, buf, nullptr, 2, 1,
                                     buf, nullptr, 2, 1, FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_many_dft(grid_.dim(), dims, 2, buf, nullptr, 2, 1,
                                     buf, nullptr, 2, 1, FFTW_BACKWARD, flags);
  if (!forward_plan_ || !inverse_plan_) {
    release();
    throw std::runtime_error("FFTW planning failed");
  }
  std::fill(buffer_, buffer_ + 2 * n, cplx{});
}

FourierTransform::~FourierTransform() { release(); }

FourierTransform::FourierTransform(FourierTransform &&other) noexcept
    : grid_(other.grid_), buffer_(std::exchange(other.buffer_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

FourierTransform &FourierTransform::operator=(FourierTransform &&other) noexcept {
  if (this != &other) {
    release();
    grid_ = other.grid_;
    buffer_ = std::exchange(other.buffer_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void FourierTransform::release() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_)
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_)
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (buffer_)
    fftw_free(buffer_);
  forward_plan_ = inverse_plan_ = nullptr;
  buffer_ = nullptr;
}

void FourierTransform::forward_unscaled() {
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
}

void FourierTransform::forward() {
  forward_unscaled();
  double const scale = 1.0 / static_cast<double>(grid_.size());
  for (cplx &z : buffer())
    z *= scale;
}

void FourierTransform::inverse() {
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
}

std::vector<cplx> forward_transform(SpinorField const &field) {
  FourierTransform fft(field.grid());
  std::ranges::copy(field.data(), fft.buffer().begin());
  fft.forward();
  return {fft.buffer().begin(), fft.buffer().end()};
}

SpinorField inverse_transform(Grid const &grid, std::span<cplx const> coeffs) {
  if (coeffs.size() != 2 * grid.size())
    throw std::invalid_argument("coefficient count does not match grid");
  FourierTransform fft(grid);
  std::ranges::copy(coeffs, fft.buffer().begin());
  fft.inverse();
  return SpinorField(grid, {fft.buffer().begin(), fft.buffer().end()});
}

TFlow::TFlow(SpectralCache const &cache, double ctau)
    : grid_(cache.grid()), ctau_(ctau) {
  double const scale = 1.0 / static_cast<double>(grid_.size());
  propagators_.reserve(cache.modes().size());
  for (ModeData const &md : cache.modes())
    propagators_.push_back(cache.flow_matrix(md, ctau, scale));
}

void TFlow::apply(SpinorField &field, FourierTransform &fft) const {
  require_same_grid(field.grid(), grid_);
  require_same_grid(fft.grid(), grid_);
  auto buf = fft.buffer();
  std::ranges::copy(field.data(), buf.begin());
  fft.forward_unscaled();
  for (std::size_t k = 0; k < propagators_.size(); ++k) {
    Mat2 const &p = propagators_[k];
    cplx const u = buf[2 * k];
    cplx const v = buf[2 * k + 1];
    buf[2 * k] = p.a00 * u + p.a01 * v;
    buf[2 * k + 1] = p.a10 * u + p.a11 * v;
  }
  fft.inverse();
  std::ranges::copy(buf, field.data().begin());
}

void apply_t_flow(SpinorField &field, double ctau, SpectralCache const &cache) {
  require_same_grid(field.grid(), cache.grid());
  if (ctau == 0.0)
    return;
  FourierTransform fft(cache.grid());
  TFlow(cache, ctau).apply(field, fft);
}

WFlowCache::WFlowCache(Grid const &grid, double ctau, double t_eval,
                       Potential const &potential, PhysParams const &params)
    : ctau_(ctau), t_eval_(t_eval) {
  phases_.resize(grid.size());
  double const scale = -ctau / params.delta();
  auto const v = potential.at(t_eval);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto const x = grid.coords(i);
    phases_[i] = unit_phase(scale * v(x[0], x[1]));
  }
}

void WFlowCache::apply(SpinorField &field) const {
  if (field.size() != phases_.size())
    throw std::invalid_argument("field size does not match W-flow cache");
  auto data = field.data();
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    data[2 * i] *= phases_[i];
    data[2 * i + 1] *= phases_[i];
  }
}

void apply_w_flow(SpinorField &field, double ctau, double t_eval,
                  Potential const &potential, PhysParams const &params) {
  if (potential.is_zero() || ctau == 0.0)
    return;
  Grid const &grid = field.grid();
  double const scale = -ctau / params.delta();
  auto data = field.data();
  auto const v = potential.at(t_eval);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto const x = grid.coords(i);
    cplx const phase = unit_phase(scale * v(x[0], x[1]));
    data[2 * i] *= phase;
    data[2 * i + 1] *= phase;
  }
}

} // namespace dirac6c
