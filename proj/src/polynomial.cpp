#include "dirac6c/polynomial.hpp"

#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dirac6c {

namespace {

int total_degree(CoeffPolynomial::Exponents const &e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

class Parser {
public:
  explicit Parser(std::string_view text) : s_(text) {}

  CoeffPolynomial parse() {
    CoeffPolynomial p = expression();
    skip_space();
    if (pos_ != s_.size())
      fail("unexpected character");
    return p;
  }

private:
  [[noreturn]] void fail(std::string const &what) const {
    throw std::invalid_argument("polynomial: " + what + " at offset " +
                                std::to_string(pos_));
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  CoeffPolynomial expression() {
    CoeffPolynomial acc;
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    acc = term();
    if (negate)
      acc = -acc;
    while (true) {
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        return acc;
    }
  }

  CoeffPolynomial term() {
    CoeffPolynomial acc = power();
    while (true) {
      if (accept('*')) {
        acc = acc * power();
      } else if (accept('/')) {
        // division only by nonzero rational constants
        CoeffPolynomial d = power();
        if (d.degree() > 0 || d.is_zero())
          fail("division by a non-constant or zero");
        acc *= Rational(1) / d.terms().begin()->second;
      } else {
        skip_space();
        // implicit multiplication: "2c1", "c1(c0-1)"
        if (pos_ < s_.size() && (s_[pos_] == 'c' || s_[pos_] == '(' ||
                                 std::isdigit(static_cast<unsigned char>(s_[pos_]))))
          acc = acc * power();
        else
          return acc;
      }
    }
  }

  CoeffPolynomial power() {
    CoeffPolynomial base = atom();
    if (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      if (start == pos_)
        fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start)))));
    }
    return base;
  }

  CoeffPolynomial atom() {
    skip_space();
    if (pos_ >= s_.size())
      fail("unexpected end of input");
    char const c = s_[pos_];
    if (c == '(') {
      ++pos_;
      CoeffPolynomial inner = expression();
      if (!accept(')'))
        fail("expected ')'");
      return inner;
    }
    if (c == 'c') {
      ++pos_;
      if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '4')
        fail("expected variable c0..c4");
      return CoeffPolynomial::variable(s_[pos_++] - '0');
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      return CoeffPolynomial(Rational(boost::multiprecision::cpp_int(
          std::string(s_.substr(start, pos_ - start)))));
    }
    fail("unexpected character");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

} // namespace

bool CoeffPolynomial::MonomialOrder::operator()(Exponents const &a,
                                                Exponents const &b) const {
  int const da = total_degree(a);
  int const db = total_degree(b);
  if (da != db)
    return da < db;
  return a > b;
}

CoeffPolynomial::CoeffPolynomial(Rational constant) {
  if (constant != 0)
    terms_.emplace(Exponents{}, std::move(constant));
}

CoeffPolynomial CoeffPolynomial::variable(int index) {
  if (index < 0 || index >= kVariables)
    throw std::out_of_range("variable index outside c0..c4");
  CoeffPolynomial p;
  Exponents e{};
  e[index] = 1;
  p.terms_.emplace(e, Rational(1));
  return p;
}

int CoeffPolynomial::degree() const {
  int d = 0;
  for (auto const &[e, c] : terms_)
    d = std::max(d, total_degree(e));
  return d;
}

CoeffPolynomial &CoeffPolynomial::operator+=(CoeffPolynomial const &other) {
  for (auto const &[e, c] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0)
        terms_.erase(it);
    }
  }
  return *this;
}

CoeffPolynomial &CoeffPolynomial::operator-=(CoeffPolynomial const &other) {
  return *this += -other;
}

CoeffPolynomial &CoeffPolynomial::operator*=(Rational const &s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto &[e, c] : terms_)
    c *= s;
  return *this;
}

CoeffPolynomial operator*(CoeffPolynomial const &a, CoeffPolynomial const &b) {
  CoeffPolynomial out;
  for (auto const &[ea, ca] : a.terms_) {
    for (auto const &[eb, cb] : b.terms_) {
      CoeffPolynomial::Exponents e;
      for (int v = 0; v < CoeffPolynomial::kVariables; ++v)
        e[v] = static_cast<std::uint8_t>(ea[v] + eb[v]);
      Rational prod = ca * cb;
      auto [it, inserted] = out.terms_.try_emplace(e, prod);
      if (!inserted) {
        it->second += prod;
        if (it->second == 0)
          out.terms_.erase(it);
      }
    }
  }
  return out;
}

CoeffPolynomial CoeffPolynomial::operator-() const {
  CoeffPolynomial out = *this;
  for (auto &[e, c] : out.terms_)
    c = -c;
  return out;
}

CoeffPolynomial CoeffPolynomial::pow(unsigned n) const {
  CoeffPolynomial out(Rational(1));
  for (unsigned k = 0; k < n; ++k)
    out = out * *this;
  return out;
}

CoeffPolynomial CoeffPolynomial::derivative(int index) const {
  if (index < 0 || index >= kVariables)
    throw std::out_of_range("variable index outside c0..c4");
  CoeffPolynomial out;
  for (auto const &[e, c] : terms_) {
    if (e[index] == 0)
      continue;
    Exponents d = e;
    --d[index];
    out.terms_.emplace(d, c * e[index]);
  }
  return out;
}

template <>
double CoeffPolynomial::evaluate<double>(
    std::array<double, kVariables> const &c) const {
  double sum = 0.0;
  for (auto const &[exps, coeff] : terms_) {
    double term = coeff.convert_to<double>();
    for (int v = 0; v < kVariables; ++v)
      for (int p = 0; p < exps[v]; ++p)
        term *= c[v];
    sum += term;
  }
  return sum;
}

std::string to_string(Rational const &r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1)
    os << '/' << denominator(r);
  return os.str();
}

std::string CoeffPolynomial::to_string() const {
  if (terms_.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  // highest degree first reads more naturally
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    auto const &[e, c] = *it;
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    bool const constant = total_degree(e) == 0;
    bool wrote = false;
    if (mag != 1 || constant) {
      os << dirac6c::to_string(mag);
      wrote = true;
    }
    for (int v = 0; v < kVariables; ++v) {
      if (e[v] == 0)
        continue;
      os << (wrote ? "*" : "") << 'c' << v;
      if (e[v] > 1)
        os << '^' << static_cast<int>(e[v]);
      wrote = true;
    }
  }
  return os.str();
}

CoeffPolynomial parse_polynomial(std::string_view text) {
  return Parser(text).parse();
}

} // namespace dirac6c
