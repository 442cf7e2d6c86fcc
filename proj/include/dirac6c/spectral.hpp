#ifndef DIRAC6C_SPECTRAL_HPP
#define DIRAC6C_SPECTRAL_HPP

#include "dirac6c/model.hpp"

#include <span>
#include <vector>

namespace dirac6c {

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
  cplx a00{}, a01{}, a10{}, a11{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Spinor apply(Spinor const &v) const {
    return {a00 * v[0] + a01 * v[1], a10 * v[0] + a11 * v[1]};
  }
  Mat2 adjoint() const {
    return {std::conj(a00), std::conj(a10), std::conj(a01), std::conj(a11)};
  }
  friend Mat2 operator*(Mat2 const &x, Mat2 const &y) {
    return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
            x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
  }
  friend Mat2 operator+(Mat2 const &x, Mat2 const &y) {
    return {x.a00 + y.a00, x.a01 + y.a01, x.a10 + y.a10, x.a11 + y.a11};
  }
  friend Mat2 operator-(Mat2 const &x, Mat2 const &y) {
    return {x.a00 - y.a00, x.a01 - y.a01, x.a10 - y.a10, x.a11 - y.a11};
  }
  friend Mat2 operator*(cplx s, Mat2 const &x) {
    return {s * x.a00, s * x.a01, s * x.a10, s * x.a11};
  }
  /// Largest entry modulus.
  double max_abs() const;
};

/// Eigendata of one Fourier mode of the free Dirac operator.
///
/// With the frequency vector mu, Gamma = -(i/eps) (mu . sigma) -
/// (i nu / (delta eps^2)) sigma_3 = -i Q D Q^*, where D = diag(omega, -omega)
/// and omega = eta / (delta eps^2), eta = sqrt(nu^2 + delta^2 eps^2 |mu|^2).
struct ModeData {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double eta = 0.0;
  double omega = 0.0;
  Mat2 q;
};

/// Per-mode eigendata for a grid. Immutable after construction; modes are
/// stored in transform order (index k maps to signed mode l = k or k - M).
class SpectralCache {
public:
  SpectralCache(PhysParams params, Grid grid);

  PhysParams const &params() const { return params_; }
  Grid const &grid() const { return grid_; }
  std::span<ModeData const> modes() const { return modes_; }

  /// Signed mode indices l (and m in 2D) in -M/2 .. M/2-1.
  ModeData const &mode(int l, int m = 0) const;

  /// Gamma assembled directly from the operator definition.
  Mat2 gamma(ModeData const &md) const;
  /// Q exp(-i ctau D) Q^*, the exact flow exp(ctau Gamma) of one mode.
  Mat2 flow_matrix(ModeData const &md, double ctau) const;
  /// Same flow times `scale`, rounded so its rows keep norm `scale`.
  Mat2 flow_matrix(ModeData const &md, double ctau, double scale) const;

  static int signed_mode(int k, int M) { return k < M / 2 ? k : k - M; }

private:
  PhysParams params_;
  Grid grid_;
  std::vector<ModeData> modes_;
};

SpectralCache build_cache(PhysParams const &params, Grid const &grid);

/// RAII wrapper around in-place FFTW plans for the two interleaved spinor
/// components. Owns an aligned work buffer; one instance per worker.
class FourierTransform {
public:
  explicit FourierTransform(Grid const &grid);
  ~FourierTransform();
  FourierTransform(FourierTransform const &) = delete;
  FourierTransform &operator=(FourierTransform const &) = delete;
  FourierTransform(FourierTransform &&other) noexcept;
  FourierTransform &operator=(FourierTransform &&other) noexcept;

  Grid const &grid() const { return grid_; }
  std::span<cplx> buffer() { return {buffer_, 2 * grid_.size()}; }

  /// In-place forward DFT of the buffer, scaled by 1/N.
  void forward();
  /// In-place inverse DFT of the buffer (no scaling).
  void inverse();
  /// Forward transform without the 1/N scaling; used by the flows, which
  /// fold the factor into their multipliers.
  void forward_unscaled();

private:
  void release();

  Grid grid_;
  cplx *buffer_ = nullptr;
  void *forward_plan_ = nullptr;
  void *inverse_plan_ = nullptr;
};

/// Fourier coefficients of a field, interleaved like SpinorField values and
/// in transform order: U~_l = (1/M) sum_j U_j exp(-2 i j l pi / M).
std::vector<cplx> forward_transform(SpinorField const &field);
SpinorField inverse_transform(Grid const &grid, std::span<cplx const> coeffs);

/// Precomputed per-mode propagators for one value of c*tau.
class TFlow {
public:
  TFlow(SpectralCache const &cache, double ctau);

  double ctau() const { return ctau_; }
  void apply(SpinorField &field, FourierTransform &fft) const;

private:
  Grid grid_;
  double ctau_;
  std::vector<Mat2> propagators_;
};

void apply_t_flow(SpinorField &field, double ctau, SpectralCache const &cache);

/// Node phases exp(-i ctau V(t_eval, x_j) / delta) for a fixed (ctau, t_eval).
class WFlowCache {
public:
  WFlowCache(Grid const &grid, double ctau, double t_eval,
             Potential const &potential, PhysParams const &params);

  double ctau() const { return ctau_; }
  double t_eval() const { return t_eval_; }
  std::span<cplx const> phases() const { return phases_; }
  void apply(SpinorField &field) const;

private:
  double ctau_;
  double t_eval_;
  std::vector<cplx> phases_;
};

void apply_w_flow(SpinorField &field, double ctau, double t_eval,
                  Potential const &potential, PhysParams const &params);

} // namespace dirac6c

#endif
