#include "dirac6c/lie.hpp"
#include "dirac6c/schemes.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace dirac6c {

namespace {

using Extended = boost::multiprecision::cpp_dec_float_50;

struct System {
  std::array<CoeffPolynomial, 5> f;
  std::array<std::array<CoeffPolynomial, 5>, 5> jac;
};

System const &system() {
  static System const s = [] {
    System out;
    out.f = order_conditions();
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        out.jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            out.f[static_cast<std::size_t>(i)].derivative(j);
    return out;
  }();
  return s;
}

/// Residual evaluated in 50-digit arithmetic at exactly representable doubles.
Coeffs residual_checked(Coeffs const &c) {
  std::array<Extended, 5> x;
  for (std::size_t i = 0; i < 5; ++i)
    x[i] = Extended(c[i]);
  Coeffs r{};
  for (std::size_t i = 0; i < 5; ++i)
    r[i] = system().f[i].evaluate(x).convert_to<double>();
  return r;
}

double max_abs(Coeffs const &v) {
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

Coeffs residuals(Coeffs const &c) {
  Coeffs r{};
  for (std::size_t i = 0; i < 5; ++i)
    r[i] = system().f[i].evaluate(c);
  return r;
}

Coeffs residuals_extended(std::array<std::string, 5> const &decimal_coeffs) {
  std::array<Extended, 5> x;
  for (std::size_t i = 0; i < 5; ++i)
    x[i] = Extended(decimal_coeffs[i]);
  Coeffs r{};
  for (std::size_t i = 0; i < 5; ++i)
    r[i] = system().f[i].evaluate(x).convert_to<double>();
  return r;
}

NewtonReport newton_solve(Coeffs const &initial, double tol, int max_iter) {
  if (!(tol > 0.0))
    throw std::invalid_argument("tolerance must be positive");
  NewtonReport rep;
  Coeffs x = initial;
  auto finish = [&](bool ok, std::string msg) {
    rep.solution = x;
    rep.residual = residual_checked(x);
    rep.residual_norm = max_abs(rep.residual);
    rep.converged = ok;
    rep.message = std::move(msg);
    return rep;
  };

  for (int it = 0;; ++it) {
    rep.iterations = it;
    for (double v : x)
      if (!std::isfinite(v))
        return finish(false, "iterate diverged");
    Coeffs const r = residual_checked(x);
    double const rn = max_abs(r);
    if (rn <= tol)
      return finish(true, "converged");
    if (it == max_iter)
      return finish(false, "no convergence within max_iter");

    Eigen::Matrix<double, 5, 5> J;
    Eigen::Matrix<double, 5, 1> F;
    for (int i = 0; i < 5; ++i) {
      F(i) = r[static_cast<std::size_t>(i)];
      for (int j = 0; j < 5; ++j)
        J(i, j) = system().jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate(x);
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(J);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) {
      rep.singular = true;
      return finish(false, "singular Jacobian at iterate " + std::to_string(it));
    }
    Eigen::Matrix<double, 5, 1> const dx = lu.solve(-F);

    // backtracking on the residual max-norm
    double lambda = 1.0;
    Coeffs trial{};
    while (true) {
      for (int i = 0; i < 5; ++i)
        trial[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + lambda * dx(i);
      if (max_abs(residuals(trial)) < rn || lambda < 1.0 / 1024.0)
        break;
      lambda *= 0.5;
    }
    if (trial == x)
      return finish(rn <= tol, "stagnated at rounding level");
    x = trial;
  }
}

MultiStartReport multi_start_solve(int n_starts, std::uint64_t seed, double lo,
                                   double hi, double tol, int max_iter) {
  if (n_starts < 1 || !(lo < hi))
    throw std::invalid_argument("invalid multi-start configuration");
  MultiStartReport out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (int s = 0; s < n_starts; ++s) {
    Coeffs init;
    for (double &v : init)
      v = dist(rng);
    NewtonReport rep = newton_solve(init, tol, max_iter);
    if (rep.converged) {
      bool seen = false;
      for (Coeffs const &root : out.roots) {
        double d = 0.0;
        for (std::size_t i = 0; i < 5; ++i)
          d = std::max(d, std::abs(root[i] - rep.solution[i]));
        if (d < 1e-8) {
          seen = true;
          break;
        }
      }
      if (!seen)
        out.roots.push_back(rep.solution);
    }
    out.runs.push_back(std::move(rep));
  }
  return out;
}

namespace {

using IMat = std::array<std::int64_t, 9>;

IMat mul(IMat const &a, IMat const &b) {
  IMat c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        c[static_cast<std::size_t>(3 * i + j)] +=
            a[static_cast<std::size_t>(3 * i + k)] * b[static_cast<std::size_t>(3 * k + j)];
  return c;
}

IMat comm(IMat const &a, IMat const &b) {
  IMat ab = mul(a, b), ba = mul(b, a);
  for (std::size_t i = 0; i < 9; ++i)
    ab[i] -= ba[i];
  return ab;
}

IMat add(IMat a, IMat const &b) {
  for (std::size_t i = 0; i < 9; ++i)
    a[i] += b[i];
  return a;
}

IMat quad(IMat const &a, IMat const &b, IMat const &c, IMat const &d) {
  return comm(a, comm(b, comm(c, d)));
}

} // namespace

bool quadruple_identity_check(int n_trials, std::uint64_t seed) {
  if (n_trials < 1)
    throw std::invalid_argument("n_trials must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(-5, 5);
  for (int t = 0; t < n_trials; ++t) {
    std::array<IMat, 4> m;
    for (auto &mat : m)
      for (auto &v : mat)
        v = dist(rng);
    auto const &[X, Y, Z, W] = m;
    IMat const lhs = add(add(quad(X, Y, Z, W), quad(Y, Z, W, X)),
                         add(quad(Z, W, X, Y), quad(W, X, Y, Z)));
    if (lhs != comm(comm(X, Z), comm(Y, W)))
      return false;
  }
  return true;
}

namespace {

struct PrintedCell {
  char const *table;
  Basis element;
  char const *text;
};

constexpr char const *kV3TWT =
    "1/6*c1^2*(c0-4*c2) + 1/3*c1*c3*(c0+2*c2) + 1/6*c3^2*(c0+2*c2)";
constexpr char const *kV3TTTTW =
    "c1^4*(7/360*c0-2/45*c2) + 1/18*c1^3*c3*(c0-4*c2) + 1/36*c1^2*c3^2*(c0-4*c2)"
    " + 1/45*c1^3*c3*(c0+2*c2) + 4/45*c1^2*c3^2*(c0+2*c2)"
    " + 7/90*c1*c3^3*(c0+2*c2) + 7/360*c3^4*(c0+2*c2)";
constexpr char const *kV3WTTTW =
    "c1^3*(1/45*c0^2-7/90*c0*c2+4/45*c2^2) + 1/18*c1^2*c3*(c0+2*c2)*(c0-4*c2)"
    " + 1/90*c1^2*c3*(c0+2*c2)^2 + 1/45*c3^3*(c0+2*c2^2)"
    " + 1/15*c1*c3^2*(c0+2*c2)^2";

std::vector<PrintedCell> printed_cells() {
  static std::string const v4_twt = std::string(kV3TWT) + " - 2/3*(c1+c3)^2*c4";
  static std::string const v4_ttttw = std::string(kV3TTTTW) + " - 2/45*(c1+c3)^4*c4";
  static std::string const v4_wtttw =
      std::string(kV3WTTTW) +
      " - 1/45*(c0+2*c2)*(c1+c3)^3*c4 + 4/45*(c1+c3)^3*c4^2"
      " - 1/18*c1^2*(c0-4*c2)*c4*(c1+c3) - 1/9*c1*c3*(c1+c3)*(c0+2*c2)*c4"
      " - 1/18*c3^2*(c1+c3)*(c0+2*c2)*c4";
  return {
      {"V3", Basis::T, "2*(c1+c3)"},
      {"V3", Basis::W, "c0+2*c2"},
      {"V3", Basis::TW, "0"},
      {"V3", Basis::TWT, kV3TWT},
      {"V3", Basis::TTTW, "0"},
      {"V3", Basis::TTTTW, kV3TTTTW},
      {"V3", Basis::WTTTW, kV3WTTTW},
      {"V4", Basis::T, "2*(c1+c3)"},
      {"V4", Basis::W, "c0+2*c2+2*c4"},
      {"V4", Basis::TW, "0"},
      {"V4", Basis::TWT, v4_twt.c_str()},
      {"V4", Basis::TTTW, "0"},
      {"V4", Basis::TTTTW, v4_ttttw.c_str()},
      {"V4", Basis::WTTTW, v4_wtttw.c_str()},
  };
}

} // namespace

std::vector<TableCell> compare_printed_tables() {
  SchemeExpansion const e = expand_scheme_stages();
  std::vector<TableCell> out;
  for (PrintedCell const &pc : printed_cells()) {
    TableCell cell;
    cell.table = pc.table;
    cell.element = basis_label(pc.element);
    cell.printed = pc.text;
    LieElement const &v = cell.table == "V3" ? e.v3 : e.v4;
    cell.derived = v.coeff(pc.element);
    cell.difference = cell.derived - parse_polynomial(cell.printed);
    cell.match = cell.difference.is_zero();
    std::string const misprint = "(c0+2*c2^2)";
    if (auto pos = cell.printed.find(misprint); pos != std::string::npos) {
      std::string fixed = cell.printed;
      fixed.replace(pos, misprint.size(), "(c0+2*c2)^2");
      cell.match_if_squared_sum = (cell.derived - parse_polynomial(fixed)).is_zero();
    }
    out.push_back(std::move(cell));
  }
  return out;
}

std::vector<LieCheck> run_lie_checks() {
  std::vector<LieCheck> checks;
  auto add_check = [&](std::string name, bool pass, std::string detail = {}) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  };

  {
    std::array<int, 5> const lie{2, 1, 2, 3, 6}, quo{2, 1, 1, 1, 2};
    bool ok = true;
    std::ostringstream d;
    for (int k = 1; k <= kMaxGrade; ++k) {
      ok = ok && free_lie_dimension(k) == lie[static_cast<std::size_t>(k - 1)] &&
           quotient_dimension(k) == quo[static_cast<std::size_t>(k - 1)] &&
           ideal_dimension(k) + quotient_dimension(k) == free_lie_dimension(k);
      d << (k > 1 ? " " : "") << "g" << k << "=" << free_lie_dimension(k) << "/"
        << ideal_dimension(k) << "/" << quotient_dimension(k);
    }
    add_check("graded dimensions (free/ideal/quotient)", ok, d.str());
  }

  LieElement const T = LieElement::generator('T');
  LieElement const W = LieElement::generator('W');
  add_check("defining relation [W,[T,W]] = 0", bracket(W, bracket(T, W)).is_zero());

  for (std::string const &w : vanishing_words()) {
    LieElement const x = LieElement::right_nested(w);
    std::string label = "[";
    for (std::size_t i = 0; i < w.size(); ++i)
      label += (i ? "," : "") + std::string(1, w[i]);
    add_check("vanishing commutator " + label + "]", x.is_zero(), x.to_string());
  }

  add_check("identity [[T,T,W],[T,W]] = [W,T,T,T,W] in the quotient",
            verify_identity_A4(true));
  add_check("same identity fails without the quotient", !verify_identity_A4(false));
  add_check("quadruple commutator identity, 100 integer trials",
            quadruple_identity_check(100));

  {
    LieElement const v4 = expand_scheme();
    bool const even = v4.grade_component(2).is_zero() && v4.grade_component(4).is_zero();
    add_check("V4 has no even-grade terms", even);
  }

  for (TableCell const &cell : compare_printed_tables()) {
    std::string detail;
    bool pass = cell.match;
    if (!cell.match) {
      detail = "derived - printed = " + cell.difference.to_string();
      if (cell.match_if_squared_sum.value_or(false)) {
        pass = true;
        detail += "; printed (c0+2c2^2) must read (c0+2c2)^2";
      }
    }
    add_check("table " + cell.table + " " + cell.element, pass, detail);
  }

  ConstantsTable const &k = builtin_constants();
  std::array<std::string, 5> digits;
  Coeffs table4{};
  for (std::size_t i = 0; i < 5; ++i) {
    digits[i] = k.text("S6c.c" + std::to_string(i));
    table4[i] = k.value("S6c.c" + std::to_string(i));
  }
  {
    Coeffs const r = residuals_extended(digits);
    add_check("order conditions at 50-digit constants <= 1e-13", max_abs(r) <= 1e-13,
              "max residual " + format_g(max_abs(r)));
  }
  {
    Coeffs init{};
    for (std::size_t i = 0; i < 5; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3g", table4[i]);
      init[i] = std::stod(buf);
    }
    NewtonReport const rep = newton_solve(init, 1e-14, 100);
    double dev = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
      dev = std::max(dev, std::abs(rep.solution[i] - table4[i]));
    add_check("Newton from 3-digit seed recovers constants within 1e-13",
              rep.converged && dev <= 1e-13,
              "deviation " + format_g(dev) + ", residual " + format_g(rep.residual_norm) +
                  ", iterations " + std::to_string(rep.iterations));
  }
  return checks;
}

} // namespace dirac6c
