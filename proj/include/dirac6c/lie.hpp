#ifndef DIRAC6C_LIE_HPP
#define DIRAC6C_LIE_HPP

#include "dirac6c/polynomial.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dirac6c {

inline constexpr int kMaxGrade = 5;

inline bool coeff_is_zero(Rational const &r) { return r == 0; }
inline bool coeff_is_zero(CoeffPolynomial const &p) { return p.is_zero(); }

/// Element of the free associative algebra on single-character letters,
/// truncated at words of length max_len. Words map to coefficients.
template <class C> class WordPoly {
public:
  using Terms = std::map<std::string, C>;

  explicit WordPoly(int max_len = kMaxGrade) : max_len_(max_len) {}

  static WordPoly letter(char a, C coeff, int max_len = kMaxGrade) {
    WordPoly p(max_len);
    p.add(std::string(1, a), coeff);
    return p;
  }
  static WordPoly unit(C coeff, int max_len = kMaxGrade) {
    WordPoly p(max_len);
    p.add(std::string(), coeff);
    return p;
  }

  int max_len() const { return max_len_; }
  Terms const &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  C coeff(std::string const &word) const {
    auto it = terms_.find(word);
    return it == terms_.end() ? C{} : it->second;
  }

  void add(std::string const &word, C const &c) {
    if (static_cast<int>(word.size()) > max_len_ || coeff_is_zero(c))
      return;
    auto [it, inserted] = terms_.try_emplace(word, c);
    if (!inserted) {
      it->second += c;
      if (coeff_is_zero(it->second))
        terms_.erase(it);
    }
  }

  /// Homogeneous component of one word length.
  WordPoly grade(int k) const {
    WordPoly out(max_len_);
    for (auto const &[w, c] : terms_)
      if (static_cast<int>(w.size()) == k)
        out.terms_.emplace(w, c);
    return out;
  }

  WordPoly &operator+=(WordPoly const &o) {
    for (auto const &[w, c] : o.terms_)
      add(w, c);
    return *this;
  }
  WordPoly &operator-=(WordPoly const &o) {
    for (auto const &[w, c] : o.terms_)
      add(w, -c);
    return *this;
  }
  template <class S> WordPoly scaled(S const &s) const {
    WordPoly out(max_len_);
    for (auto const &[w, c] : terms_)
      out.add(w, s * c);
    return out;
  }

  friend WordPoly operator+(WordPoly a, WordPoly const &b) { return a += b; }
  friend WordPoly operator-(WordPoly a, WordPoly const &b) { return a -= b; }
  friend WordPoly operator*(WordPoly const &a, WordPoly const &b) {
    WordPoly out(std::min(a.max_len_, b.max_len_));
    for (auto const &[wa, ca] : a.terms_)
      for (auto const &[wb, cb] : b.terms_)
        if (static_cast<int>(wa.size() + wb.size()) <= out.max_len_)
          out.add(wa + wb, ca * cb);
    return out;
  }
  friend bool operator==(WordPoly const &a, WordPoly const &b) {
    return a.terms_ == b.terms_;
  }

private:
  int max_len_;
  Terms terms_;
};

template <class C> WordPoly<C> commutator(WordPoly<C> const &a, WordPoly<C> const &b) {
  return a * b - b * a;
}

/// Right-nested bracket [a1,[a2,[...,ak]]] of generator letters in the free
/// associative algebra, e.g. "TWT" -> [T,[W,T]].
WordPoly<Rational> right_nested_free(std::string_view word);

/// Quotient basis of the free Lie algebra on {T, W} modulo the ideal
/// generated by [W,[T,W]], through grade 5. Elements are right-nested.
enum class Basis : int { T, W, TW, TWT, TTTW, TTTTW, WTTTW };
inline constexpr int kBasisSize = 7;

int basis_grade(Basis b);
/// Right-nested letter string, e.g. Basis::TWT -> "TWT".
std::string basis_word(Basis b);
/// Bracket notation, e.g. Basis::TWT -> "[T,W,T]".
std::string basis_label(Basis b);

/// Dimensions of the homogeneous free Lie algebra, of the ideal and of the
/// quotient at grade k (1..5).
int free_lie_dimension(int grade);
int ideal_dimension(int grade);
int quotient_dimension(int grade);

/// Lyndon-word bracketing of the Hall-type basis at one grade.
std::vector<std::string> hall_words(int grade);
std::vector<WordPoly<Rational>> hall_basis(int grade);

/// Coordinates in the quotient basis of a Lie polynomial given in the free
/// associative algebra. Throws std::invalid_argument if the input is not a
/// Lie element of grade <= 5.
std::array<Rational, kBasisSize> reduce_to_quotient(WordPoly<Rational> const &x);

/// The quotient-basis representative lifted to the free algebra.
WordPoly<Rational> lift(Basis b);

class LieElement {
public:
  LieElement() = default;

  static LieElement generator(char letter, CoeffPolynomial coeff = CoeffPolynomial(1L));
  static LieElement basis(Basis b, CoeffPolynomial coeff = CoeffPolynomial(1L));
  /// Right-nested bracket of generators reduced into the quotient.
  static LieElement right_nested(std::string_view word);

  CoeffPolynomial const &coeff(Basis b) const { return c_[static_cast<int>(b)]; }
  CoeffPolynomial &coeff(Basis b) { return c_[static_cast<int>(b)]; }

  bool is_zero() const;
  /// True once a bracket dropped a nonzero contribution of grade >= 6.
  bool truncated() const { return truncated_; }
  int max_grade() const;
  LieElement grade_component(int grade) const;

  LieElement &operator+=(LieElement const &o);
  LieElement &operator-=(LieElement const &o);
  friend LieElement operator+(LieElement a, LieElement const &b) { return a += b; }
  friend LieElement operator-(LieElement a, LieElement const &b) { return a -= b; }
  LieElement operator-() const;
  friend LieElement operator*(CoeffPolynomial const &s, LieElement const &x);
  friend LieElement operator*(Rational const &s, LieElement const &x) {
    return CoeffPolynomial(s) * x;
  }

  /// Coefficient equality; the truncation flag is ignored.
  friend bool operator==(LieElement const &a, LieElement const &b) {
    return a.c_ == b.c_;
  }

  std::string to_string() const;

private:
  friend LieElement bracket(LieElement const &, LieElement const &);
  std::array<CoeffPolynomial, kBasisSize> c_;
  bool truncated_ = false;
};

LieElement bracket(LieElement const &x, LieElement const &y);

/// U with exp(X) exp(Y) exp(X) = exp(U) through grade 5.
LieElement symmetric_bch(LieElement const &x, LieElement const &y);

/// V_1..V_4 of the nine-exponential palindrome
/// W(c4) T(c3) W(c2) T(c1) W(c0) T(c1) W(c2) T(c3) W(c4), tau absorbed.
struct SchemeExpansion {
  LieElement v1, v2, v3, v4;
};
SchemeExpansion expand_scheme_stages();
LieElement expand_scheme();

/// a_1..a_5: coefficients of T, W, [T,W,T], [T,T,T,T,W], [W,T,T,T,W] in V_4.
std::array<CoeffPolynomial, 5> condition_polynomials();
/// Residual form {a_1 - 1, a_2 - 1, a_3, a_4, a_5}.
std::array<CoeffPolynomial, 5> order_conditions();

using Coeffs = std::array<double, 5>;

struct NewtonReport {
  Coeffs solution{};
  Coeffs residual{};
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool singular = false;
  std::string message;
};

/// Damped Newton on order_conditions() with exact polynomial Jacobian.
NewtonReport newton_solve(Coeffs const &initial, double tol = 1e-14,
                          int max_iter = 100);

/// Residuals of order_conditions() evaluated in 50-digit arithmetic from
/// decimal strings, rounded to double at the end.
Coeffs residuals_extended(std::array<std::string, 5> const &decimal_coeffs);
Coeffs residuals(Coeffs const &c);

struct MultiStartReport {
  std::vector<NewtonReport> runs;
  /// Distinct converged roots (componentwise merge tolerance 1e-8).
  std::vector<Coeffs> roots;
};
MultiStartReport multi_start_solve(int n_starts, std::uint64_t seed,
                                   double lo = -3.0, double hi = 3.0,
                                   double tol = 1e-13, int max_iter = 200);

/// [[T,T,W],[T,W]] == [W,T,T,T,W], checked in the quotient or in the free
/// Lie algebra.
bool verify_identity_A4(bool use_quotient = true);

/// Random 3x3 integer matrices: [X,Y,Z,W]+[Y,Z,W,X]+[Z,W,X,Y]+[W,X,Y,Z] ==
/// [[X,Z],[Y,W]] in exact integer arithmetic.
bool quadruple_identity_check(int n_trials, std::uint64_t seed = 20250101);

/// Right-nested words that vanish once [W,[T,W]] = 0 (X = T, Y = W).
std::vector<std::string> vanishing_words();

/// One cell of the coefficient tables as printed, compared with the
/// derived polynomial.
struct TableCell {
  std::string table;  // "V3" or "V4"
  std::string element;
  std::string printed;
  CoeffPolynomial derived;
  CoeffPolynomial difference;  // derived - printed
  bool match = false;
  /// Set when the printed text contains "(c0+2c2^2)": whether reading it as
  /// (c0+2c2)^2 makes the cell match.
  std::optional<bool> match_if_squared_sum;
};
std::vector<TableCell> compare_printed_tables();

/// Invariant suite behind `verify-lie`. A printed-table cell passes when it
/// matches, or when its only difference is the exactly identified
/// "(c0+2c2^2)" misprint.
struct LieCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<LieCheck> run_lie_checks();

} // namespace dirac6c

#endif
