#include "dirac6c/lie.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dirac6c {

namespace {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;  // row-major

constexpr std::array<char const *, kBasisSize> kBasisWords = {
    "T", "W", "TW", "TWT", "TTTW", "TTTTW", "WTTTW"};

/// Word of length k <-> index with T = 0, W = 1, first letter most significant.
std::string word_of(std::size_t index, int k) {
  std::string w(static_cast<std::size_t>(k), 'T');
  for (int p = k - 1; p >= 0; --p, index >>= 1)
    if (index & 1U)
      w[static_cast<std::size_t>(p)] = 'W';
  return w;
}

std::size_t index_of(std::string const &w) {
  std::size_t idx = 0;
  for (char c : w) {
    if (c != 'T' && c != 'W')
      throw std::invalid_argument("letter outside {T, W}");
    idx = (idx << 1) | (c == 'W' ? 1U : 0U);
  }
  return idx;
}

Vec to_vector(WordPoly<Rational> const &x, int k) {
  Vec v(std::size_t{1} << k);
  for (auto const &[w, c] : x.terms())
    if (static_cast<int>(w.size()) == k)
      v[index_of(w)] = c;
  return v;
}

bool is_zero_vec(Vec const &v) {
  return std::all_of(v.begin(), v.end(), [](Rational const &r) { return r == 0; });
}

/// Incremental row echelon form used to test linear independence.
class Echelon {
public:
  /// Adds v if independent of the rows so far; returns whether it was added.
  bool insert(Vec v) {
    for (auto const &[pivot, row] : rows_) {
      if (v[pivot] == 0)
        continue;
      Rational const f = v[pivot] / row[pivot];
      for (std::size_t j = 0; j < v.size(); ++j)
        v[j] -= f * row[j];
    }
    auto it = std::find_if(v.begin(), v.end(), [](Rational const &r) { return r != 0; });
    if (it == v.end())
      return false;
    std::size_t const pivot = static_cast<std::size_t>(it - v.begin());
    // keep earlier rows reduced at the new pivot
    for (auto &[p, row] : rows_) {
      if (row[pivot] == 0)
        continue;
      Rational const f = row[pivot] / v[pivot];
      for (std::size_t j = 0; j < v.size(); ++j)
        row[j] -= f * v[j];
    }
    rows_.emplace_back(pivot, std::move(v));
    return true;
  }
  std::size_t rank() const { return rows_.size(); }

private:
  std::vector<std::pair<std::size_t, Vec>> rows_;
};

Mat inverse(Mat a) {
  std::size_t const n = a.size();
  Mat inv(n, Vec(n));
  for (std::size_t i = 0; i < n; ++i)
    inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0)
      ++piv;
    if (piv == n)
      throw std::logic_error("singular Gram matrix in quotient construction");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Rational const d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0)
        continue;
      Rational const f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

bool is_lyndon(std::string const &w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!(w < w.substr(i)))
      return false;
  return true;
}

WordPoly<Rational> lyndon_bracket(std::string const &w) {
  if (w.size() == 1)
    return WordPoly<Rational>::letter(w[0], Rational(1));
  // standard factorisation: longest proper Lyndon suffix
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::string const v = w.substr(i);
    if (is_lyndon(v))
      return commutator(lyndon_bracket(w.substr(0, i)), lyndon_bracket(v));
  }
  throw std::logic_error("no Lyndon factorisation");
}

struct Tables {
  struct Grade {
    std::vector<std::string> hall_words;
    std::vector<WordPoly<Rational>> hall;
    std::vector<WordPoly<Rational>> ideal;
    std::vector<int> reps;  // Basis indices of this grade
    Mat columns;            // reps then ideal, each a word vector
    Mat left_inverse;       // rows: coordinates along columns
  };
  std::array<Grade, kMaxGrade + 1> grades;
  std::array<WordPoly<Rational>, kBasisSize> lifts;
  std::array<std::array<std::array<Rational, kBasisSize>, kBasisSize>, kBasisSize> sc{};

  Tables() {
    for (int b = 0; b < kBasisSize; ++b) {
      lifts[static_cast<std::size_t>(b)] = right_nested_free(kBasisWords[static_cast<std::size_t>(b)]);
      int const g = static_cast<int>(std::string_view(kBasisWords[static_cast<std::size_t>(b)]).size());
      grades[static_cast<std::size_t>(g)].reps.push_back(b);
    }

    std::vector<WordPoly<Rational>> ideal_prev;
    for (int k = 1; k <= kMaxGrade; ++k) {
      Grade &gr = grades[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
        std::string w = word_of(i, k);
        if (is_lyndon(w)) {
          gr.hall_words.push_back(w);
          gr.hall.push_back(lyndon_bracket(w));
        }
      }

      // ideal spanned by ad_T, ad_W applied to the previous grade's ideal
      std::vector<WordPoly<Rational>> candidates;
      if (k == 3)
        candidates.push_back(right_nested_free("WTW"));
      for (auto const &g : ideal_prev)
        for (char s : {'T', 'W'})
          candidates.push_back(commutator(WordPoly<Rational>::letter(s, Rational(1)), g));
      Echelon ideal_ech;
      for (auto const &c : candidates)
        if (ideal_ech.insert(to_vector(c, k)))
          gr.ideal.push_back(c);
      ideal_prev = gr.ideal;

      Echelon all;
      for (int b : gr.reps) {
        gr.columns.push_back(to_vector(lifts[static_cast<std::size_t>(b)], k));
        if (!all.insert(gr.columns.back()))
          throw std::logic_error("quotient representatives are dependent");
      }
      for (auto const &g : gr.ideal) {
        gr.columns.push_back(to_vector(g, k));
        if (!all.insert(gr.columns.back()))
          throw std::logic_error("representatives meet the ideal");
      }
      if (all.rank() != gr.hall.size())
        throw std::logic_error("representatives and ideal do not span grade " +
                               std::to_string(k));

      // L = (C^T C)^{-1} C^T
      std::size_t const n = gr.columns.size();
      std::size_t const m = gr.columns.front().size();
      Mat gram(n, Vec(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t r = 0; r < m; ++r)
            gram[i][j] += gr.columns[i][r] * gr.columns[j][r];
      Mat const ginv = inverse(gram);
      gr.left_inverse.assign(n, Vec(m));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t j = 0; j < n; ++j)
            gr.left_inverse[i][r] += ginv[i][j] * gr.columns[j][r];
    }

    for (int i = 0; i < kBasisSize; ++i)
      for (int j = 0; j < kBasisSize; ++j) {
        auto const gi = basis_grade(static_cast<Basis>(i));
        auto const gj = basis_grade(static_cast<Basis>(j));
        if (gi + gj > kMaxGrade)
          continue;
        sc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            reduce(commutator(lifts[static_cast<std::size_t>(i)], lifts[static_cast<std::size_t>(j)]));
      }
  }

  std::array<Rational, kBasisSize> reduce(WordPoly<Rational> const &x) const {
    std::array<Rational, kBasisSize> out{};
    for (auto const &[w, c] : x.terms()) {
      int const k = static_cast<int>(w.size());
      if (k == 0 || k > kMaxGrade)
        throw std::invalid_argument("element has a component outside grades 1..5");
    }
    for (int k = 1; k <= kMaxGrade; ++k) {
      Grade const &gr = grades[static_cast<std::size_t>(k)];
      Vec const v = to_vector(x, k);
      if (is_zero_vec(v))
        continue;
      std::size_t const n = gr.columns.size();
      Vec coords(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < v.size(); ++r)
          coords[i] += gr.left_inverse[i][r] * v[r];
      for (std::size_t r = 0; r < v.size(); ++r) {
        Rational back = 0;
        for (std::size_t i = 0; i < n; ++i)
          back += gr.columns[i][r] * coords[i];
        if (back != v[r])
          throw std::invalid_argument("element is not a Lie polynomial");
      }
      for (std::size_t i = 0; i < gr.reps.size(); ++i)
        out[static_cast<std::size_t>(gr.reps[i])] = coords[i];
    }
    return out;
  }
};

Tables const &tables() {
  static Tables const t;
  return t;
}

} // namespace

WordPoly<Rational> right_nested_free(std::string_view word) {
  if (word.empty())
    throw std::invalid_argument("empty bracket word");
  auto acc = WordPoly<Rational>::letter(word.back(), Rational(1));
  for (std::size_t i = word.size() - 1; i-- > 0;)
    acc = commutator(WordPoly<Rational>::letter(word[i], Rational(1)), acc);
  return acc;
}

int basis_grade(Basis b) {
  return static_cast<int>(std::string_view(kBasisWords[static_cast<std::size_t>(b)]).size());
}

std::string basis_word(Basis b) { return kBasisWords[static_cast<std::size_t>(b)]; }

std::string basis_label(Basis b) {
  std::string const w = basis_word(b);
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i)
      out += ',';
    out += w[i];
  }
  return w.size() == 1 ? w : out + "]";
}

int free_lie_dimension(int grade) {
  if (grade < 1 || grade > kMaxGrade)
    throw std::out_of_range("grade outside 1..5");
  return static_cast<int>(tables().grades[static_cast<std::size_t>(grade)].hall.size());
}

int ideal_dimension(int grade) {
  if (grade < 1 || grade > kMaxGrade)
    throw std::out_of_range("grade outside 1..5");
  return static_cast<int>(tables().grades[static_cast<std::size_t>(grade)].ideal.size());
}

int quotient_dimension(int grade) {
  if (grade < 1 || grade > kMaxGrade)
    throw std::out_of_range("grade outside 1..5");
  return static_cast<int>(tables().grades[static_cast<std::size_t>(grade)].reps.size());
}

std::vector<std::string> hall_words(int grade) {
  if (grade < 1 || grade > kMaxGrade)
    throw std::out_of_range("grade outside 1..5");
  return tables().grades[static_cast<std::size_t>(grade)].hall_words;
}

std::vector<WordPoly<Rational>> hall_basis(int grade) {
  if (grade < 1 || grade > kMaxGrade)
    throw std::out_of_range("grade outside 1..5");
  return tables().grades[static_cast<std::size_t>(grade)].hall;
}

std::array<Rational, kBasisSize> reduce_to_quotient(WordPoly<Rational> const &x) {
  return tables().reduce(x);
}

WordPoly<Rational> lift(Basis b) { return tables().lifts[static_cast<std::size_t>(b)]; }

LieElement LieElement::generator(char letter, CoeffPolynomial coeff) {
  if (letter == 'T')
    return basis(Basis::T, std::move(coeff));
  if (letter == 'W')
    return basis(Basis::W, std::move(coeff));
  throw std::invalid_argument("generator must be T or W");
}

LieElement LieElement::basis(Basis b, CoeffPolynomial coeff) {
  LieElement x;
  x.coeff(b) = std::move(coeff);
  return x;
}

LieElement LieElement::right_nested(std::string_view word) {
  if (word.size() > static_cast<std::size_t>(kMaxGrade))
    throw std::invalid_argument("bracket word longer than grade 5");
  auto const coords = reduce_to_quotient(right_nested_free(word));
  LieElement x;
  for (int i = 0; i < kBasisSize; ++i)
    x.c_[static_cast<std::size_t>(i)] = CoeffPolynomial(coords[static_cast<std::size_t>(i)]);
  return x;
}

bool LieElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](auto const &p) { return p.is_zero(); });
}

int LieElement::max_grade() const {
  int g = 0;
  for (int i = 0; i < kBasisSize; ++i)
    if (!c_[static_cast<std::size_t>(i)].is_zero())
      g = std::max(g, basis_grade(static_cast<Basis>(i)));
  return g;
}

LieElement LieElement::grade_component(int grade) const {
  LieElement out;
  for (int i = 0; i < kBasisSize; ++i)
    if (basis_grade(static_cast<Basis>(i)) == grade)
      out.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)];
  return out;
}

LieElement &LieElement::operator+=(LieElement const &o) {
  for (std::size_t i = 0; i < c_.size(); ++i)
    c_[i] += o.c_[i];
  truncated_ = truncated_ || o.truncated_;
  return *this;
}

LieElement &LieElement::operator-=(LieElement const &o) {
  for (std::size_t i = 0; i < c_.size(); ++i)
    c_[i] -= o.c_[i];
  truncated_ = truncated_ || o.truncated_;
  return *this;
}

LieElement LieElement::operator-() const {
  LieElement out = *this;
  for (auto &p : out.c_)
    p = -p;
  return out;
}

LieElement operator*(CoeffPolynomial const &s, LieElement const &x) {
  LieElement out = x;
  for (auto &p : out.c_)
    p = s * p;
  return out;
}

std::string LieElement::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < kBasisSize; ++i) {
    auto const &p = c_[static_cast<std::size_t>(i)];
    if (p.is_zero())
      continue;
    if (!first)
      os << " + ";
    first = false;
    os << '(' << p.to_string() << ")*" << basis_label(static_cast<Basis>(i));
  }
  return first ? "0" : os.str();
}

LieElement bracket(LieElement const &x, LieElement const &y) {
  auto const &sc = tables().sc;
  LieElement out;
  out.truncated_ = x.truncated_ || y.truncated_;
  for (int i = 0; i < kBasisSize; ++i) {
    auto const &xi = x.c_[static_cast<std::size_t>(i)];
    if (xi.is_zero())
      continue;
    for (int j = 0; j < kBasisSize; ++j) {
      auto const &yj = y.c_[static_cast<std::size_t>(j)];
      if (yj.is_zero())
        continue;
      if (basis_grade(static_cast<Basis>(i)) + basis_grade(static_cast<Basis>(j)) > kMaxGrade) {
        out.truncated_ = true;
        continue;
      }
      CoeffPolynomial prod;
      bool computed = false;
      for (int k = 0; k < kBasisSize; ++k) {
        Rational const &s = sc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        if (s == 0)
          continue;
        if (!computed) {
          prod = xi * yj;
          computed = true;
        }
        out.c_[static_cast<std::size_t>(k)] += s * prod;
      }
    }
  }
  return out;
}

namespace {

/// [a1,[a2,[...,ak]]]
LieElement nest(std::initializer_list<LieElement const *> args) {
  auto it = std::rbegin(args);
  LieElement acc = **it;
  for (++it; it != std::rend(args); ++it)
    acc = bracket(**it, acc);
  return acc;
}

} // namespace

LieElement symmetric_bch(LieElement const &x, LieElement const &y) {
  auto const r = [](long p, long q) { return Rational(p, q); };
  LieElement u = Rational(2) * x + y;
  u += r(1, 6) * nest({&y, &y, &x});
  u -= r(1, 6) * nest({&x, &x, &y});
  u += r(7, 360) * nest({&x, &x, &x, &x, &y});
  u -= r(1, 360) * nest({&y, &y, &y, &y, &x});
  u += r(1, 90) * nest({&x, &y, &y, &y, &x});
  u += r(1, 45) * nest({&y, &x, &x, &x, &y});
  u -= r(1, 60) * nest({&x, &x, &y, &y, &x});
  u += r(1, 30) * nest({&y, &y, &x, &x, &y});
  return u;
}

SchemeExpansion expand_scheme_stages() {
  auto c = [](int i) { return CoeffPolynomial::variable(i); };
  SchemeExpansion e;
  e.v1 = symmetric_bch(LieElement::generator('T', c(1)), LieElement::generator('W', c(0)));
  e.v2 = symmetric_bch(LieElement::generator('W', c(2)), e.v1);
  e.v3 = symmetric_bch(LieElement::generator('T', c(3)), e.v2);
  e.v4 = symmetric_bch(LieElement::generator('W', c(4)), e.v3);
  return e;
}

LieElement expand_scheme() {
  static LieElement const v4 = expand_scheme_stages().v4;
  return v4;
}

std::array<CoeffPolynomial, 5> condition_polynomials() {
  LieElement const v4 = expand_scheme();
  return {v4.coeff(Basis::T), v4.coeff(Basis::W), v4.coeff(Basis::TWT),
          v4.coeff(Basis::TTTTW), v4.coeff(Basis::WTTTW)};
}

std::array<CoeffPolynomial, 5> order_conditions() {
  auto a = condition_polynomials();
  a[0] -= CoeffPolynomial(1L);
  a[1] -= CoeffPolynomial(1L);
  return a;
}

bool verify_identity_A4(bool use_quotient) {
  WordPoly<Rational> const lhs =
      commutator(right_nested_free("TTW"), right_nested_free("TW"));
  WordPoly<Rational> const rhs = right_nested_free("WTTTW");
  WordPoly<Rational> const diff = lhs - rhs;
  if (!use_quotient)
    return diff.is_zero();
  auto const coords = reduce_to_quotient(diff);
  return std::all_of(coords.begin(), coords.end(), [](Rational const &r) { return r == 0; });
}

std::vector<std::string> vanishing_words() {
  return {"WWT", "TWWT", "WWWWT", "TWWWT", "TTWWT", "WWTTW", "TWTTW"};
}

} // namespace dirac6c
