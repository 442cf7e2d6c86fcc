#include "dirac6c/polynomial.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <doctest.h>

#include <random>

using namespace dirac6c;

namespace {
CoeffPolynomial c(int i) { return CoeffPolynomial::variable(i); }
} // namespace

TEST_CASE("ring arithmetic") {
  CoeffPolynomial const x = c(0), y = c(1);
  CoeffPolynomial const lhs = (x + y) * (x - y);
  CoeffPolynomial const rhs = x * x - y * y;
  CHECK(lhs == rhs);
  CHECK((x + y).pow(3) == x.pow(3) + Rational(3) * x * x * y + Rational(3) * x * y * y + y.pow(3));
  CHECK((x - x).is_zero());
  CHECK(CoeffPolynomial(0L).is_zero());
  CHECK((x * y * c(4)).degree() == 3);
  CHECK(CoeffPolynomial(Rational(2, 3)).degree() == 0);
  CHECK((-x + x).is_zero());
}

TEST_CASE("canonical text round trips through the parser") {
  CoeffPolynomial const p = Rational(4, 45) * c(1).pow(3) * c(2).pow(2) -
                            Rational(7, 90) * c(0) * c(1).pow(3) * c(2) + Rational(1, 6);
  std::string const text = p.to_string();
  CHECK(text == "4/45*c1^3*c2^2 - 7/90*c0*c1^3*c2 + 1/6");
  CHECK(parse_polynomial(text) == p);
  CHECK(CoeffPolynomial(0L).to_string() == "0");
  CHECK((-c(3)).to_string() == "-c3");
}

TEST_CASE("parser accepts the printed notation") {
  CHECK(parse_polynomial("(c0+2c2)^2") == (c(0) + Rational(2) * c(2)).pow(2));
  CHECK(parse_polynomial("1/45 c3^3 (c0^2 - c0)") ==
        Rational(1, 45) * c(3).pow(3) * (c(0) * c(0) - c(0)));
  CHECK(parse_polynomial("-c1*(c2 - 1/2)") == -(c(1) * (c(2) - Rational(1, 2))));
  CHECK(parse_polynomial("c4/3") == Rational(1, 3) * c(4));
  CHECK_THROWS_AS(parse_polynomial("c5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("(c0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("c0 ^ c1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("1/0"), std::invalid_argument);
}

TEST_CASE("derivatives") {
  CoeffPolynomial const p = parse_polynomial("3*c0^2*c1 - c1^3 + 5");
  CHECK(p.derivative(0) == parse_polynomial("6*c0*c1"));
  CHECK(p.derivative(1) == parse_polynomial("3*c0^2 - 3*c1^2"));
  CHECK(p.derivative(4).is_zero());
}

TEST_CASE("evaluation agrees with exact rational evaluation") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(-9, 9);
  CoeffPolynomial const p =
      parse_polynomial("7/360*c0*c1^4 - 2/45*c1^4*c2 + c3^3*c4^2 - 1/3");
  for (int trial = 0; trial < 20; ++trial) {
    std::array<Rational, 5> r;
    std::array<double, 5> x;
    for (int i = 0; i < 5; ++i) {
      r[i] = Rational(d(rng), 4);
      x[i] = r[i].convert_to<double>();
    }
    Rational const exact = p.evaluate(r);
    CHECK(p.evaluate(x) == doctest::Approx(exact.convert_to<double>()).epsilon(1e-14));
  }
  using boost::multiprecision::cpp_dec_float_50;
  std::array<cpp_dec_float_50, 5> hp{cpp_dec_float_50("0.5"), 1, 2, 0, 0};
  CHECK(parse_polynomial("c0*c1 - 1/2").evaluate(hp) == 0);
}

TEST_CASE("rational text") {
  CHECK(to_string(Rational(-3, 6)) == "-1/2");
  CHECK(to_string(Rational(4)) == "4");
}
