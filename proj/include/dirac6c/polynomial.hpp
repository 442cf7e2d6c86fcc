#ifndef DIRAC6C_POLYNOMIAL_HPP
#define DIRAC6C_POLYNOMIAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace dirac6c {

using Rational = boost::multiprecision::cpp_rational;

/// Exact polynomial in the five splitting coefficients c0..c4 with rational
/// coefficients. Zero terms are never stored, so structural equality is
/// mathematical equality.
class CoeffPolynomial {
public:
  static constexpr int kVariables = 5;
  using Exponents = std::array<std::uint8_t, kVariables>;

  /// Graded order: lower total degree first, then lexicographic with
  /// higher powers of c0 first.
  struct MonomialOrder {
    bool operator()(Exponents const &a, Exponents const &b) const;
  };
  using Terms = std::map<Exponents, Rational, MonomialOrder>;

  CoeffPolynomial() = default;
  CoeffPolynomial(Rational constant);
  CoeffPolynomial(long constant) : CoeffPolynomial(Rational(constant)) {}

  static CoeffPolynomial variable(int index);

  Terms const &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  CoeffPolynomial &operator+=(CoeffPolynomial const &other);
  CoeffPolynomial &operator-=(CoeffPolynomial const &other);
  CoeffPolynomial &operator*=(Rational const &s);

  friend CoeffPolynomial operator+(CoeffPolynomial a, CoeffPolynomial const &b) {
    return a += b;
  }
  friend CoeffPolynomial operator-(CoeffPolynomial a, CoeffPolynomial const &b) {
    return a -= b;
  }
  friend CoeffPolynomial operator*(CoeffPolynomial const &a,
                                   CoeffPolynomial const &b);
  friend CoeffPolynomial operator*(Rational const &s, CoeffPolynomial a) {
    return a *= s;
  }
  CoeffPolynomial operator-() const;
  CoeffPolynomial pow(unsigned n) const;

  friend bool operator==(CoeffPolynomial const &, CoeffPolynomial const &) = default;

  CoeffPolynomial derivative(int index) const;

  /// Horner-free direct evaluation; T must be constructible from the
  /// numerator and denominator of a Rational.
  template <class T> T evaluate(std::array<T, kVariables> const &c) const;

  /// Canonical text form, e.g. "7/360*c0*c1^4 - 2/45*c1^4*c2".
  std::string to_string() const;

private:
  Terms terms_;
};

template <class T>
T CoeffPolynomial::evaluate(std::array<T, kVariables> const &c) const {
  T sum = T(0);
  for (auto const &[exps, coeff] : terms_) {
    T term = T(numerator(coeff)) / T(denominator(coeff));
    for (int v = 0; v < kVariables; ++v)
      for (int p = 0; p < exps[v]; ++p)
        term *= c[v];
    sum += term;
  }
  return sum;
}

template <>
double CoeffPolynomial::evaluate<double>(std::array<double, kVariables> const &c) const;

/// Parses expressions over c0..c4 with + - * ^, parentheses and rational
/// literals ("1/6", "7/360", "2"). Throws std::invalid_argument.
CoeffPolynomial parse_polynomial(std::string_view text);

std::string to_string(Rational const &r);

} // namespace dirac6c

#endif
