#include "dirac6c/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace dirac6c;

namespace {

double max_diff(SpinorField const &a, SpinorField const &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double mat_diff(Mat2 const &a, Mat2 const &b) { return (a - b).max_abs(); }

} // namespace

TEST_CASE("forward transform matches a naive DFT") {
  std::mt19937_64 rng(7);
  Grid const g = make_grid(1, -3.0, 5.0, 24);
  SpinorField const f = oracle::random_field(g, rng);
  auto const coeffs = forward_transform(f);
  for (int comp = 0; comp < 2; ++comp) {
    auto const ref = oracle::naive_dft(f, comp);
    for (int l = 0; l < 24; ++l)
      CHECK(std::abs(coeffs[2 * l + comp] - ref[l]) < 1e-14);
  }
}

TEST_CASE("transform round trips in 1D and 2D") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    Grid const g = make_grid(dim, -2.0, 2.0, dim == 1 ? 64 : 16);
    SpinorField const f = oracle::random_field(g, rng);
    SpinorField const back = inverse_transform(g, forward_transform(f));
    CHECK(max_diff(f, back) < 1e-13);

    FourierTransform fft(g);
    std::ranges::copy(f.data(), fft.buffer().begin());
    fft.forward();
    fft.inverse();
    double m = 0.0;
    for (std::size_t i = 0; i < f.data().size(); ++i)
      m = std::max(m, std::abs(fft.buffer()[i] - f.data()[i]));
    CHECK(m < 1e-13);
  }
}

TEST_CASE("2D transform uses row-major (x, y) layout") {
  using namespace std::complex_literals;
  Grid const g = make_grid(2, 0.0, 2.0 * std::numbers::pi, 8);
  SpinorField f(g);
  for (int j = 0; j < 8; ++j)
    for (int l = 0; l < 8; ++l) {
      auto const c = g.coords(g.index(j, l));
      f.component(g.index(j, l), 0) = std::exp(1i * (2.0 * c[0] - 1.0 * c[1]));
    }
  auto const coeffs = forward_transform(f);
  // mode (2, -1) sits at transform index (2, 7)
  CHECK(std::abs(coeffs[2 * g.index(2, 7)] - std::exp(1i * (2.0 * 0.0))) < 1e-13);
  double others = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (i != g.index(2, 7))
      others = std::max(others, std::abs(coeffs[2 * i]));
  CHECK(others < 1e-13);
}

TEST_CASE("mode eigendata diagonalises the free generator") {
  PhysParams const p(0.7, 0.9, 0.4);
  for (int dim : {1, 2}) {
    SpectralCache const cache(p, make_grid(dim, -1.0, 3.0, 8));
    for (ModeData const &md : cache.modes()) {
      Mat2 const &q = md.q;
      CHECK(mat_diff(q * q.adjoint(), Mat2::identity()) < 1e-14);
      using namespace std::complex_literals;
      Mat2 const d{-1i * md.omega, 0.0, 0.0, 1i * md.omega};
      Mat2 const g = cache.gamma(md);
      CHECK(mat_diff(q * d * q.adjoint(), g) < 1e-12 * (1.0 + g.max_abs()));
      double const de = p.delta() * p.epsilon();
      double const eta =
          std::sqrt(p.nu() * p.nu() + de * de * (md.mu_x * md.mu_x + md.mu_y * md.mu_y));
      CHECK(md.eta == doctest::Approx(eta));
      CHECK(md.omega == doctest::Approx(eta / (p.delta() * p.epsilon() * p.epsilon())));
    }
  }
}

TEST_CASE("zero mode propagator is a pure mass phase") {
  PhysParams const p(1.0, 1.0, 0.5);
  SpectralCache const cache(p, make_grid(1, 0.0, 1.0, 8));
  Mat2 const u = cache.flow_matrix(cache.mode(0), 0.3);
  CHECK(std::abs(u.a00 - std::polar(1.0, -0.3 * 4.0)) < 1e-15);
  CHECK(std::abs(u.a11 - std::polar(1.0, 0.3 * 4.0)) < 1e-15);
  CHECK(std::abs(u.a01) < 1e-15);
}

TEST_CASE("stored propagators are unitary to within one rounding") {
  PhysParams const p(0.7, 1.0, 1.0);
  SpectralCache const cache(p, make_grid(2, -4.0, 4.0, 32));
  for (double scale : {1.0, 1.0 / 1024, 1.0 / 3}) {
    long double const target = static_cast<long double>(scale) * scale;
    long double sum = 0.0L, worst = 0.0L;
    for (ModeData const &md : cache.modes()) {
      Mat2 const u = cache.flow_matrix(md, 0.37, scale);
      long double const n = std::norm(std::complex<long double>(u.a00)) +
                            std::norm(std::complex<long double>(u.a01));
      long double const err = std::fabs(n / target - 1.0L);
      sum += err;
      worst = std::max(worst, err);
      CHECK(u.a11 == std::conj(u.a00));
      CHECK(u.a10 == -std::conj(u.a01));
    }
    CHECK(worst <= 0x1p-52L);
    CHECK(sum / cache.modes().size() <= 0x1p-54L);
  }
}

TEST_CASE("T flow agrees with a dense matrix exponential") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ct(-2.0, 2.0);
  for (int M : {4, 8, 16}) {
    PhysParams const p(0.8, 0.6, 0.5);
    Grid const g = make_grid(1, -2.0, 3.0, M);
    SpectralCache const cache(p, g);
    oracle::CMatrix const G = oracle::free_generator_1d(M, 5.0, 0.8, 0.6, 0.5);
    for (int k = 0; k < 3; ++k) {
      double const c = ct(rng);
      oracle::CMatrix const E = oracle::expm(G, c);
      SpinorField f = oracle::random_field(g, rng);
      oracle::CVector const expect = E * oracle::to_vector(f);
      apply_t_flow(f, c, cache);
      CHECK((oracle::to_vector(f) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("T flow is unitary and additive") {
  std::mt19937_64 rng(5);
  for (int dim : {1, 2}) {
    Grid const g = make_grid(dim, -4.0, 4.0, dim == 1 ? 64 : 16);
    SpectralCache const cache(PhysParams(1.0, 1.0, 0.3), g);
    SpinorField const f = oracle::random_field(g, rng);

    SpinorField u = f;
    apply_t_flow(u, 0.37, cache);
    CHECK(mass(u) == doctest::Approx(mass(f)).epsilon(1e-14));

    SpinorField ab = f;
    apply_t_flow(ab, 0.2, cache);
    apply_t_flow(ab, 0.17, cache);
    CHECK(max_diff(ab, u) < 1e-12);

    apply_t_flow(u, -0.37, cache);
    CHECK(max_diff(u, f) < 1e-12);

    SpinorField z = f;
    apply_t_flow(z, 0.0, cache);
    CHECK(max_diff(z, f) < 1e-14);
  }
}

TEST_CASE("W flow is a unitary node phase and additive") {
  std::mt19937_64 rng(9);
  Grid const g = make_grid(1, -16.0, 16.0, 64);
  PhysParams const p(0.5, 1.0, 1.0);
  Potential const v = rational_potential_1d();
  SpinorField const f = oracle::random_field(g, rng);

  SpinorField w = f;
  apply_w_flow(w, 0.4, 0.0, v, p);
  CHECK(mass(w) == doctest::Approx(mass(f)).epsilon(1e-14));
  for (std::size_t i = 0; i < g.size(); i += 7) {
    cplx const phase = std::polar(1.0, -0.4 * v(0.0, g.coords(i)[0]) / 0.5);
    CHECK(std::abs(w.component(i, 0) - phase * f.component(i, 0)) < 1e-14);
    CHECK(std::abs(w.component(i, 1) - phase * f.component(i, 1)) < 1e-14);
  }

  SpinorField ab = f;
  apply_w_flow(ab, 0.1, 0.0, v, p);
  apply_w_flow(ab, 0.3, 0.0, v, p);
  CHECK(max_diff(ab, w) < 1e-14);

  WFlowCache const cache(g, 0.4, 0.0, v, p);
  SpinorField c = f;
  cache.apply(c);
  CHECK(max_diff(c, w) < 1e-15);
}

TEST_CASE("flows reject fields on a different grid") {
  SpectralCache const cache(PhysParams(1, 1, 1), make_grid(1, 0.0, 1.0, 8));
  SpinorField f(make_grid(1, 0.0, 1.0, 16));
  CHECK_THROWS(apply_t_flow(f, 0.1, cache));
}
