#include "dirac6c/schemes.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dirac6c;

namespace {

double max_diff(SpinorField const &a, SpinorField const &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double l2_diff(SpinorField const &a, SpinorField const &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    s += std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

} // namespace

TEST_CASE("every catalog scheme is consistent") {
  for (std::string const &name : catalog_names()) {
    CAPTURE(name);
    SchemeSpec const s = catalog(name);
    CHECK_NOTHROW(s.validate());
    double st = 0.0, sw = 0.0;
    for (SchemeStep const &step : s.steps)
      (step.kind == OpKind::T ? st : sw) += step.coeff;
    CHECK(st == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sw == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t i = 1; i < s.steps.size(); ++i)
      CHECK(s.steps[i].kind != s.steps[i - 1].kind);
  }
}

TEST_CASE("symmetric schemes are palindromes") {
  for (std::string const &name : catalog_names()) {
    SchemeSpec const s = catalog(name);
    if (!s.symmetric)
      continue;
    CAPTURE(name);
    for (std::size_t i = 0, j = s.steps.size() - 1; i < j; ++i, --j) {
      CHECK(s.steps[i].kind == s.steps[j].kind);
      CHECK(s.steps[i].coeff == doctest::Approx(s.steps[j].coeff).epsilon(1e-14));
    }
  }
  CHECK_FALSE(catalog("S1").symmetric);
}

TEST_CASE("W time offsets accumulate the T coefficients applied before them") {
  SchemeSpec const s = catalog("S6c");
  auto const &k = builtin_constants();
  REQUIRE(s.steps.size() == 9);
  // executed right to left: W(c4) first at offset 0, last W(c4) at offset 1
  CHECK(s.steps[8].time_offset == 0.0);
  CHECK(s.steps[6].time_offset == doctest::Approx(k.value("S6c.c3")));
  CHECK(s.steps[4].time_offset == doctest::Approx(k.value("S6c.c3") + k.value("S6c.c1")));
  CHECK(s.steps[0].time_offset == doctest::Approx(1.0));

  SchemeSpec const s2 = catalog("S2");
  REQUIRE(s2.steps.size() == 3);
  CHECK(s2.steps[0].kind == OpKind::W);
  CHECK(s2.steps[0].coeff == 0.5);
  CHECK(s2.steps[1].coeff == 1.0);
  CHECK(s2.steps[2].time_offset == 0.0);
  CHECK(s2.steps[0].time_offset == 1.0);
}

TEST_CASE("validation catches broken programs") {
  SchemeSpec s = catalog("S2");
  s.steps[1].coeff = 0.9;
  CHECK_THROWS_AS(s.validate(), std::logic_error);
  s = catalog("S2");
  s.steps[0].time_offset = 0.5;
  CHECK_THROWS_AS(s.validate(), std::logic_error);
  s = catalog("S4");
  s.steps[0].coeff += 1e-3;
  s.steps[2].coeff -= 1e-3;
  CHECK_THROWS_AS(s.validate(), std::logic_error);
  CHECK_THROWS_AS(catalog("S7"), std::invalid_argument);
}

TEST_CASE("operator counts") {
  CHECK(op_count(catalog("S1")) == OpCount{1, 1});
  CHECK(op_count(catalog("S2")) == OpCount{1, 2});
  CHECK(op_count(catalog("S4")) == OpCount{3, 4});
  CHECK(op_count(catalog("S4c")) == OpCount{2, 3});
  CHECK(op_count(catalog("S4RK")) == OpCount{6, 7});
  CHECK(op_count(catalog("S6c")) == OpCount{4, 5});
  CHECK(op_count(catalog("S6star")) == OpCount{25, 26});
  CHECK(op_count(catalog("S6-A")) == OpCount{7, 8});
  CHECK(op_count(catalog("S6")) == op_count(catalog("S6-A")));
  CHECK_FALSE(catalog("S6").note.empty());
}

TEST_CASE("constants table parsing") {
  ConstantsTable const t = ConstantsTable::parse("# c\n a = 1.5 # trailing\nb=-2e-3\n\n");
  CHECK(t.value("a") == 1.5);
  CHECK(t.value("b") == -2e-3);
  CHECK(t.text("a") == "1.5");
  CHECK_FALSE(t.contains("c"));
  CHECK_THROWS(t.value("c"));
  CHECK_THROWS(ConstantsTable::parse("a = 1\na = 2\n"));
  CHECK(builtin_constants().text("S6c.c0").size() >= 50);
  CHECK(builtin_constants().value("S6c.c0") == 0.56752783701702083198289862647776935943946193310303);
}

TEST_CASE("zero and constant potentials reduce a scheme to closed forms") {
  std::mt19937_64 rng(17);
  Grid const g = make_grid(1, -4.0, 4.0, 32);
  PhysParams const p(0.5, 1.0, 0.7);
  SpectralCache const cache(p, g);
  SpinorField const f = oracle::random_field(g, rng);
  for (char const *name : {"S2", "S4RK", "S6c", "S6star"}) {
    CAPTURE(name);
    SpinorField free = f;
    apply_t_flow(free, 0.3, cache);
    SpinorField const a = step(f, 0.3, 0.0, catalog(name), Potential::zero(), cache);
    CHECK(max_diff(a, free) < 1e-12);

    SpinorField const b = step(f, 0.3, 0.0, catalog(name), Potential::constant(0.8), cache);
    free *= std::polar(1.0, -0.3 * 0.8 / 0.5);
    CHECK(max_diff(b, free) < 1e-12);
  }
}

TEST_CASE("symmetric schemes are time reversible and unitary") {
  std::mt19937_64 rng(23);
  Grid const g = make_grid(1, -16.0, 16.0, 64);
  PhysParams const p(1.0, 1.0, 1.0);
  SpectralCache const cache(p, g);
  Potential const v = rational_potential_1d();
  SpinorField const f = oracle::random_field(g, rng);
  for (std::string const &name : catalog_names()) {
    CAPTURE(name);
    SchemeSpec const s = catalog(name);
    SpinorField const fwd = step(f, 0.1, 0.0, s, v, cache);
    CHECK(mass(fwd) == doctest::Approx(mass(f)).epsilon(1e-13));
    if (s.symmetric) {
      SpinorField back = fwd;
      Stepper(s, cache, v, -0.1).step(back, 0.1);
      CHECK(max_diff(back, f) < 1e-12);
    }
  }
}

TEST_CASE("Stepper matches the free functions and rejects bad steps") {
  Grid const g = make_grid(1, -16.0, 16.0, 128);
  SpectralCache const cache(PhysParams(1, 1, 1), g);
  Potential const v = rational_potential_1d();
  SpinorField const f = gaussian_ic(g, {{{{0, 0}, {1, 0}}}});
  Stepper st(catalog("S4"), cache, v, 0.05);
  SpinorField a = f;
  st.evolve(a, 0.0, 10);
  SpinorField const b = evolve(f, 0.05, 0.0, 10, catalog("S4"), v, cache);
  CHECK(max_diff(a, b) == 0.0);
  CHECK_THROWS_AS(Stepper(catalog("S2"), cache, v, 0.0), std::invalid_argument);
  SpinorField wrong(make_grid(1, -16.0, 16.0, 64));
  CHECK_THROWS_AS(st.step(wrong, 0.0), std::invalid_argument);
}

TEST_CASE("observed temporal orders on a smooth 1D problem") {
  Grid const g = make_grid(1, -16.0, 16.0, 256);
  PhysParams const p(1.0, 1.0, 1.0);
  SpectralCache const cache(p, g);
  Potential const v = rational_potential_1d();
  SpinorField const f = gaussian_ic(g, {{{{0, 0}, {1, 0}}}});
  SpinorField const ref = evolve(f, 1.0 / 512, 0.0, 512, catalog("S6-A"), v, cache);
  struct Case {
    char const *name;
    double lo, hi, tau;
  };
  for (Case const &c : {Case{"S1", 0.8, 1.2, 0.05}, Case{"S2", 1.8, 2.2, 0.1},
                        Case{"S4", 3.6, 4.4, 0.1}, Case{"S4c", 3.6, 4.4, 0.1},
                        Case{"S4RK", 3.6, 4.4, 0.2}, Case{"S6c", 5.5, 6.5, 0.125},
                        Case{"S6star", 5.5, 6.5, 0.25}}) {
    CAPTURE(c.name);
    auto err = [&](double tau) {
      long const n = std::lround(1.0 / tau);
      return l2_diff(evolve(f, tau, 0.0, n, catalog(c.name), v, cache), ref);
    };
    double const rate = std::log2(err(c.tau) / err(c.tau / 2));
    CAPTURE(rate);
    CHECK(rate > c.lo);
    CHECK(rate < c.hi);
  }
}
