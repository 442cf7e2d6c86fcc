#include "dirac6c/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace dirac6c;

TEST_CASE("physical parameters are restricted to (0, 1]") {
  CHECK_NOTHROW(PhysParams(1.0, 1.0, 1.0));
  CHECK_NOTHROW(PhysParams(0.5, 0.25, 1e-3));
  CHECK_THROWS_AS(PhysParams(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PhysParams(1.0, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PhysParams(1.0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(PhysParams(1.0, 1.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("grid geometry") {
  Grid const g = make_grid(1, -16.0, 16.0, 512);
  CHECK(g.size() == 512);
  CHECK(g.h() == doctest::Approx(1.0 / 16.0));
  CHECK(g.coords(0)[0] == -16.0);
  CHECK(g.coords(511)[0] == doctest::Approx(16.0 - 1.0 / 16.0));

  Grid const g2 = make_grid(2, -8.0, 8.0, 128);
  CHECK(g2.size() == 128 * 128);
  CHECK(g2.cell_volume() == doctest::Approx(1.0 / 64.0));
  CHECK(g2.index(3, 5) == 3 * 128 + 5);
  auto const c = g2.coords(g2.index(3, 5));
  CHECK(c[0] == doctest::Approx(-8.0 + 3.0 / 8.0));
  CHECK(c[1] == doctest::Approx(-8.0 + 5.0 / 8.0));

  CHECK_THROWS_AS(make_grid(1, 0.0, 1.0, 511), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 0.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 1.0, 0.0, 8), std::invalid_argument);
}

TEST_CASE("Gaussian mass matches the closed-form integral") {
  // Each component integrates exp(-|x|^2) to pi^(dim/2); the trapezoidal rule
  // is spectrally accurate for a Gaussian far from the boundary.
  Grid const g1 = make_grid(1, -16.0, 16.0, 256);
  SpinorField const f1 = gaussian_ic(g1, {{{{0.0, 0.0}, {1.0, 0.0}}}});
  CHECK(mass(f1) == doctest::Approx(2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-14));

  Grid const g2 = make_grid(2, -8.0, 8.0, 64);
  SpinorField const f2 = gaussian_ic(g2, {{{{0.0, 0.0}, {1.0, 0.0}}}});
  CHECK(mass(f2) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("Gaussian components are centered where requested") {
  Grid const g = make_grid(1, -4.0, 4.0, 16);
  SpinorField const f = gaussian_ic(g, {{{{0.0, 0.0}, {1.0, 0.0}}}});
  std::size_t const origin = 8, one = 10;
  CHECK(f.component(origin, 0).real() == doctest::Approx(1.0));
  CHECK(f.component(one, 1).real() == doctest::Approx(1.0));
  CHECK(f.component(origin, 1).real() == doctest::Approx(std::exp(-0.5)));
  CHECK(f.component(origin, 0).imag() == 0.0);
}

TEST_CASE("spinor field storage and scaling") {
  Grid const g = make_grid(1, 0.0, 1.0, 4);
  SpinorField f(g);
  f.set(2, {cplx{1, 2}, cplx{3, 4}});
  CHECK(f.data()[4] == cplx{1, 2});
  CHECK(f.data()[5] == cplx{3, 4});
  f *= cplx{0, 1};
  CHECK(f.at(2)[0] == cplx{-2, 1});
  CHECK(f.all_finite());
  f.component(0, 1) = cplx{std::nan(""), 0};
  CHECK_FALSE(f.all_finite());
  CHECK_THROWS_AS(SpinorField(g, std::vector<cplx>(7)), std::invalid_argument);
}

TEST_CASE("honeycomb potential") {
  using std::numbers::pi;
  Potential const v = honeycomb_potential(ThetaMode::Constant);
  CHECK(v(0.0, 0.0, 0.0) == doctest::Approx(3.0));
  CHECK(v.time_independent());
  CHECK(v(0.3, 0.2, -0.1) == doctest::Approx(v(0.7, 0.2, -0.1)));

  // Threefold rotational symmetry about the origin.
  double const x = 0.31, y = -0.17;
  double const c = std::cos(2 * pi / 3), s = std::sin(2 * pi / 3);
  CHECK(v(0.0, x, y) == doctest::Approx(v(0.0, c * x - s * y, s * x + c * y)));

  CHECK(honeycomb_theta(ThetaMode::Constant, 0.4) == doctest::Approx(pi));
  CHECK(honeycomb_theta(ThetaMode::Linear, 0.5) == doctest::Approx(1.5 * pi));
  CHECK(honeycomb_theta(ThetaMode::Cosine, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  Potential const lin = honeycomb_potential("linear");
  CHECK_FALSE(lin.time_independent());
  // theta(1) = 2 pi under the linear mode, a half turn from theta(0) = pi.
  CHECK(lin(1.0, x, y) == doctest::Approx(v(0.0, -x, -y)));
  CHECK(parse_theta_mode(to_string(ThetaMode::Cosine)) == ThetaMode::Cosine);
  CHECK_THROWS_AS(parse_theta_mode("spiral"), std::invalid_argument);
}

TEST_CASE("cosine rotation has period two in time") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  Potential const v = honeycomb_potential(ThetaMode::Cosine);
  // |dV/dtheta| <= 3 k |r| ~ 250 here; pi (t + 2) and pi cos(.) leave theta
  // off by up to ~8 ulps of 2 pi.
  double const tol = 3 * (4 * std::numbers::pi / std::sqrt(3.0)) * 8 * std::sqrt(2.0) * 8 * 0x1p-50;
  for (int k = 0; k < 50; ++k) {
    double const t = u(rng) / 8, x = u(rng), y = u(rng);
    CHECK(std::abs(v(t + 2.0, x, y) - v(t, x, y)) <= tol);
  }
}

TEST_CASE("time slices agree bitwise with pointwise evaluation") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (char const *mode : {"constant", "linear", "cosine"}) {
    Potential const v = honeycomb_potential(mode);
    for (int k = 0; k < 20; ++k) {
      double const t = u(rng) / 4;
      auto const slice = v.at(t);
      double const x = u(rng), y = u(rng);
      CHECK(slice(x, y) == v(t, x, y));
    }
  }
  Potential const r = rational_potential_1d();
  CHECK(r.at(0.5)(0.3, 0.0) == r(0.5, 0.3));
}

TEST_CASE("rational potential and simple potentials") {
  Potential const v = rational_potential_1d();
  CHECK(v(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(v(0.0, 1.0) == doctest::Approx(0.0));
  CHECK(v(0.0, -1.0) == doctest::Approx(1.0));
  CHECK(v(0.0, 3.0) == doctest::Approx(-0.2));
  CHECK(Potential::zero().is_zero());
  CHECK(Potential::constant(0.0).is_zero());
  CHECK(Potential::constant(2.5)(1.0, 3.0, 4.0) == 2.5);
  CHECK(Potential::constant(2.5).description() != Potential::constant(2.25).description());
}

TEST_CASE("sampled potential looks up the nearest node periodically") {
  Grid const g = make_grid(1, 0.0, 4.0, 4);
  Potential const v = sampled_potential(g, {1.0, 2.0, 3.0, 4.0});
  CHECK(v(0.0, 1.1) == 2.0);
  CHECK(v(0.0, 4.0) == 1.0);
  CHECK(v(0.0, -1.0) == 4.0);
  CHECK_THROWS_AS(sampled_potential(g, {1.0, 2.0}), std::invalid_argument);
  CHECK(v.description() != sampled_potential(g, {1.0, 2.0, 3.0, 5.0}).description());
}
