#include "dirac6c/harness.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace dirac6c;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("dirac6c-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ProblemConfig small_problem() {
  ProblemConfig p = desk_rational_1d(1.0);
  p.M = 128;
  p.t_final = 0.5;
  return p;
}

} // namespace

TEST_CASE("error metrics agree with a long-double oracle") {
  std::mt19937_64 rng(31);
  for (int dim : {1, 2}) {
    Grid const g = make_grid(dim, -2.0, 2.0, dim == 1 ? 64 : 16);
    SpinorField const a = oracle::random_field(g, rng);
    SpinorField const b = oracle::random_field(g, rng);
    ErrorTriple const e = error_metrics(a, b);
    oracle::Metrics const o = oracle::metrics(a, b);
    CHECK(e.e_phi == doctest::Approx(double(o.e_phi)).epsilon(1e-13));
    CHECK(e.e_rho == doctest::Approx(double(o.e_rho)).epsilon(1e-13));
    CHECK(e.e_J == doctest::Approx(double(o.e_J)).epsilon(1e-13));
    ErrorTriple const z = error_metrics(a, a);
    CHECK(z.e_phi == 0.0);
    CHECK(z.e_rho == 0.0);
    CHECK(z.e_J == 0.0);
  }
  CHECK_THROWS_AS(error_metrics(SpinorField(make_grid(1, 0, 1, 4)),
                                SpinorField(make_grid(1, 0, 1, 8))),
                  std::invalid_argument);
}

TEST_CASE("density and current errors are invariant under a global phase") {
  std::mt19937_64 rng(37);
  Grid const g = make_grid(2, -2.0, 2.0, 16);
  SpinorField const a = oracle::random_field(g, rng);
  SpinorField const b = oracle::random_field(g, rng);
  for (double alpha : {0.3, 1.7, -2.9}) {
    SpinorField a2 = a;
    a2 *= std::polar(1.0, alpha);
    ErrorTriple const e = error_metrics(a, b);
    ErrorTriple const e2 = error_metrics(a2, b);
    CHECK(e2.e_rho == doctest::Approx(e.e_rho).epsilon(1e-12));
    CHECK(error_metrics(a2, a).e_rho < 1e-13);
    CHECK(error_metrics(a2, a).e_J < 1e-13);
    CHECK(error_metrics(a2, a).e_phi > 0.1);
  }
}

TEST_CASE("restriction picks every k-th node") {
  Grid const fine = make_grid(2, -1.0, 1.0, 16);
  Grid const coarse = make_grid(2, -1.0, 1.0, 4);
  SpinorField f(fine);
  for (std::size_t i = 0; i < fine.size(); ++i)
    f.set(i, {cplx(fine.coords(i)[0], 0), cplx(fine.coords(i)[1], 0)});
  SpinorField const r = restrict_to(f, coarse);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(r.component(i, 0).real() == doctest::Approx(coarse.coords(i)[0]));
    CHECK(r.component(i, 1).real() == doctest::Approx(coarse.coords(i)[1]));
  }
  CHECK_THROWS_AS(restrict_to(f, make_grid(2, -1.0, 1.0, 6)), std::invalid_argument);
  CHECK_THROWS_AS(restrict_to(f, make_grid(2, -1.0, 2.0, 4)), std::invalid_argument);
}

TEST_CASE("step counts must be exact") {
  CHECK(step_count(1.0, 0.125) == 8);
  CHECK(step_count(2.0 * M_PI, M_PI / 64) == 128);
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK_THROWS_AS(step_count(1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(step_count(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(step_count(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("order fit") {
  std::vector<double> taus{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> errs;
  for (double t : taus)
    errs.push_back(3.0 * std::pow(t, 4));
  OrderFit const f = fit_order(taus, errs, 0.0);
  REQUIRE(f.order.has_value());
  CHECK(*f.order == doctest::Approx(4.0));
  CHECK(f.points_used == 5);

  // only points above the floor enter the fit
  errs[3] = errs[4] = 1e-20;
  OrderFit const g = fit_order(taus, errs, 1e-10);
  REQUIRE(g.order.has_value());
  CHECK(*g.order == doctest::Approx(4.0));
  CHECK(g.points_used == 3);

  OrderFit const h = fit_order(taus, errs, 3.0 * std::pow(0.2, 4));
  CHECK_FALSE(h.order.has_value());
  CHECK_THROWS_AS(fit_order({1.0}, {1.0, 2.0}, 0.0), std::invalid_argument);
}

TEST_CASE("reference key depends on everything that shapes the solution") {
  ProblemConfig const p = small_problem();
  ReferenceProtocol const r;
  std::string const k = reference_key(p, r);
  CHECK(k.size() == 16);
  CHECK(reference_key(p, r) == k);
  ProblemConfig q = p;
  q.epsilon = 0.5;
  CHECK(reference_key(q, r) != k);
  q = p;
  q.ic.centers[1][0] = 0.5;
  CHECK(reference_key(q, r) != k);
  ReferenceProtocol r2 = r;
  r2.tau = 5e-4;
  CHECK(reference_key(p, r2) != k);
  r2 = r;
  r2.scheme = "S6-A";
  CHECK(reference_key(p, r2) != k);
}

TEST_CASE("reference files round trip and reject mismatches") {
  TempDir dir;
  ProblemConfig const p = small_problem();
  ReferenceProtocol const r{"S4", 0.05, 0};
  SpinorField const f = propagate(p, p.grid(), catalog("S4"), 0.05).field;
  std::string const path = (dir.path / "ref.bin").string();
  write_reference_file(path, f, p, r);
  auto const back = read_reference_file(path, p, r);
  REQUIRE(back.has_value());
  for (std::size_t i = 0; i < f.data().size(); ++i)
    REQUIRE(back->data()[i] == f.data()[i]);

  ProblemConfig q = p;
  q.nu = 0.5;
  CHECK_FALSE(read_reference_file(path, q, r).has_value());
  CHECK_FALSE(read_reference_file(path, p, {"S4", 0.025, 0}).has_value());
  CHECK_FALSE(read_reference_file((dir.path / "missing.bin").string(), p, r).has_value());

  // truncated payload
  fs::resize_file(path, fs::file_size(path) - 8);
  CHECK_FALSE(read_reference_file(path, p, r).has_value());
}

TEST_CASE("reference solutions are cached on disk") {
  TempDir dir;
  ProblemConfig const p = small_problem();
  ReferenceProtocol const r{"S2", 0.01, 0};
  RunOptions const opt{1, dir.path.string()};
  SpinorField const a = reference_solution(p, r, opt);
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);
  SpinorField const b = reference_solution(p, r, opt);
  SpinorField const c = reference_solution(p, r, {});
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    REQUIRE(a.data()[i] == b.data()[i]);
    REQUIRE(a.data()[i] == c.data()[i]);
  }
}

TEST_CASE("temporal convergence study on a small problem") {
  ProblemConfig const p = small_problem();
  ConvergenceStudy const s =
      temporal_convergence("S2", {0.0125, 0.1, 0.05, 0.025}, p, {"S6c", 0.001, 0});
  REQUIRE(s.records.size() == 4);
  CHECK(s.records[0].tau == 0.1);
  CHECK(std::isnan(s.records[0].rate));
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(s.records[i].tau < s.records[i - 1].tau);
    CHECK(s.records[i].rate == doctest::Approx(2.0).epsilon(0.05));
    CHECK(s.records[i].mass_drift < 1e-13);
  }
  CHECK(s.floor > 0.0);
  CHECK(s.floor < 1e-9);
  REQUIRE(s.fit_phi.order.has_value());
  CHECK(*s.fit_phi.order == doctest::Approx(2.0).epsilon(0.05));
  CHECK_FALSE(s.saturated());
  CHECK_THROWS_AS(temporal_convergence("S2", {0.1, 0.05}, p, {"S6c", 0.1, 0}),
                  std::invalid_argument);
}

TEST_CASE("spatial convergence study") {
  ProblemConfig p = small_problem();
  ConvergenceStudy const s = spatial_convergence("S6c", {32, 64, 128}, p, {"S6c", 0.01, 256});
  REQUIRE(s.records.size() == 3);
  CHECK(s.records[0].h == 1.0);
  CHECK(s.records[2].h == 0.25);
  CHECK(s.records[1].rate > 10.0);
  CHECK(s.records[2].rate > 10.0);
}

TEST_CASE("sweep step lists are exact rationals") {
  SweepSpec s;
  s.mode = Resonance::Resonant;
  s.tau0 = Rational(1, 2);
  s.epsilons = {1, Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 16),
                Rational(1, 32)};
  auto const units = s.tau_units();
  REQUIRE(units.size() == 5);
  CHECK(units[4] == Rational(1, 512));
  CHECK(s.taus()[1] == doctest::Approx(M_PI / 8));
  CHECK_NOTHROW(s.validate());

  s.epsilons = {1};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.mode = Resonance::Nonresonant;
  CHECK_NOTHROW(s.validate());
  CHECK(s.taus()[0] == 0.5);
  s.refinements = 2;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("mass series stays at round-off") {
  ProblemConfig const p = small_problem();
  auto const drift = mass_series("S6c", p, 0.05, 50);
  REQUIRE(drift.size() == 50);
  for (double d : drift)
    CHECK(d < 1e-13);
}

TEST_CASE("parallel_for visits each index once and propagates failures") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto const &h : hits)
    CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7)
                                   throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("problem validation") {
  ProblemConfig p = small_problem();
  CHECK_NOTHROW(p.validate());
  p.M = 127;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_problem();
  p.potential = "magnetic";
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_problem();
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
