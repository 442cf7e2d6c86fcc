#include "dirac6c/schemes.hpp"

#include "scheme_constants_data.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dirac6c {

namespace {

using Factors = std::vector<std::pair<OpKind, double>>;

constexpr double kSumTolerance = 1e-14;
constexpr double kOffsetTolerance = 1e-12;

Factors strang(double c) {
  return {{OpKind::W, 0.5 * c}, {OpKind::T, c}, {OpKind::W, 0.5 * c}};
}

/// Product S2(w_0 c) S2(w_1 c) ... written left to right.
Factors strang_product(std::vector<double> const &weights, double c = 1.0) {
  Factors out;
  for (double w : weights) {
    Factors block = strang(w * c);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::string trim(std::string_view s) {
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  auto const last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

SchemeSpec yoshida(std::string const &name, ConstantsTable const &k) {
  double const w1 = k.value(name + ".w1");
  double const w2 = k.value(name + ".w2");
  double const w3 = k.value(name + ".w3");
  double const w0 = 1.0 - 2.0 * (w1 + w2 + w3);
  SchemeSpec s = build_scheme(name, strang_product({w3, w2, w1, w0, w1, w2, w3}),
                              6, true);
  s.note = "fused cost is T=7 W=8; the published operator table lists T=9 W=10";
  return s;
}

SchemeSpec suzuki(ConstantsTable const &k) {
  double const p2 = k.value("S6star.p2");
  double const p3 = k.value("S6star.p3");
  std::vector<double> const third{p2, p2, 1.0 - 4.0 * p2, p2, p2};
  std::vector<double> weights;
  for (double outer : {p3, p3, 1.0 - 4.0 * p3, p3, p3})
    for (double inner : third)
      weights.push_back(outer * inner);
  return build_scheme("S6star", strang_product(weights), 6, true);
}

} // namespace

void SchemeSpec::validate() const {
  auto fail = [this](std::string const &what) {
    throw std::logic_error("scheme " + name + ": " + what);
  };
  if (steps.empty())
    fail("empty step program");
  double sum_t = 0.0;
  double sum_w = 0.0;
  double elapsed = 0.0;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (!std::isfinite(it->coeff))
      fail("non-finite coefficient");
    if (it->kind == OpKind::T) {
      sum_t += it->coeff;
      elapsed += it->coeff;
    } else {
      sum_w += it->coeff;
      if (std::abs(it->time_offset - elapsed) > kOffsetTolerance)
        fail("W time offset does not match the preceding T coefficients");
    }
  }
  if (std::abs(sum_t - 1.0) > kSumTolerance)
    fail("T coefficients do not sum to 1");
  if (std::abs(sum_w - 1.0) > kSumTolerance)
    fail("W coefficients do not sum to 1");
  if (symmetric) {
    for (std::size_t i = 0, j = steps.size() - 1; i < j; ++i, --j) {
      if (steps[i].kind != steps[j].kind ||
          std::abs(steps[i].coeff - steps[j].coeff) > kSumTolerance)
        fail("declared symmetric but the program is not palindromic");
    }
  }
}

OpCount op_count(SchemeSpec const &spec) {
  OpCount c;
  for (SchemeStep const &s : spec.steps)
    (s.kind == OpKind::T ? c.t : c.w) += 1;
  return c;
}

SchemeSpec build_scheme(std::string name, Factors const &factors,
                        int declared_order, bool symmetric) {
  SchemeSpec spec;
  spec.name = std::move(name);
  spec.declared_order = declared_order;
  spec.symmetric = symmetric;
  for (auto const &[kind, coeff] : factors) {
    if (!spec.steps.empty() && spec.steps.back().kind == kind)
      spec.steps.back().coeff += coeff;
    else
      spec.steps.push_back({kind, coeff, 0.0});
  }
  double elapsed = 0.0;
  for (auto it = spec.steps.rbegin(); it != spec.steps.rend(); ++it) {
    if (it->kind == OpKind::T)
      elapsed += it->coeff;
    else
      it->time_offset = elapsed;
  }
  spec.validate();
  return spec;
}

ConstantsTable ConstantsTable::parse(std::string_view text) {
  ConstantsTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto const hash = line.find('#');
    std::string const body = trim(std::string_view(line).substr(0, hash));
    if (body.empty())
      continue;
    auto const eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("constants line " + std::to_string(lineno) +
                                  ": expected `name = value`");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    char *end = nullptr;
    std::strtod(value.c_str(), &end);
    if (key.empty() || value.empty() || *end != '\0')
      throw std::invalid_argument("constants line " + std::to_string(lineno) +
                                  ": malformed entry");
    if (!table.entries_.emplace(key, value).second)
      throw std::invalid_argument("constants line " + std::to_string(lineno) +
                                  ": duplicate name '" + key + "'");
  }
  return table;
}

double ConstantsTable::value(std::string const &name) const {
  return std::strtod(text(name).c_str(), nullptr);
}

std::string const &ConstantsTable::text(std::string const &name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw std::out_of_range("missing constant '" + name + "'");
  return it->second;
}

bool ConstantsTable::contains(std::string const &name) const {
  return entries_.contains(name);
}

std::vector<std::string> ConstantsTable::names() const {
  std::vector<std::string> out;
  for (auto const &[k, v] : entries_)
    out.push_back(k);
  return out;
}

std::string_view builtin_constants_text() { return kSchemeConstantsText; }

ConstantsTable const &builtin_constants() {
  static ConstantsTable const table =
      ConstantsTable::parse(builtin_constants_text());
  return table;
}

std::vector<std::string> catalog_names() {
  return {"S1",   "S2",   "S4",   "S4c",    "S4RK",
          "S6-A", "S6-B", "S6-C", "S6star", "S6c"};
}

SchemeSpec catalog(std::string const &name) {
  return catalog(name, builtin_constants());
}

SchemeSpec catalog(std::string const &name, ConstantsTable const &k) {
  if (name == "S1")
    return build_scheme(name, {{OpKind::T, 1.0}, {OpKind::W, 1.0}}, 1, false);
  if (name == "S2")
    return build_scheme(name, strang(1.0), 2, true);
  if (name == "S4") {
    double const theta = k.value("S4.theta");
    return build_scheme(name, strang_product({theta, 1.0 - 2.0 * theta, theta}),
                        4, true);
  }
  if (name == "S4c") {
    return build_scheme(name,
                        {{OpKind::W, 1.0 / 6.0},
                         {OpKind::T, 0.5},
                         {OpKind::W, 2.0 / 3.0},
                         {OpKind::T, 0.5},
                         {OpKind::W, 1.0 / 6.0}},
                        4, true);
  }
  if (name == "S4RK") {
    double const a1 = k.value("S4RK.a1");
    double const a2 = k.value("S4RK.a2");
    double const a3 = k.value("S4RK.a3");
    double const a4 = 1.0 - 2.0 * (a1 + a2 + a3);
    double const b1 = k.value("S4RK.b1");
    double const b2 = k.value("S4RK.b2");
    double const b3 = 0.5 - (b1 + b2);
    return build_scheme(name,
                        {{OpKind::W, a1},
                         {OpKind::T, b1},
                         {OpKind::W, a2},
                         {OpKind::T, b2},
                         {OpKind::W, a3},
                         {OpKind::T, b3},
                         {OpKind::W, a4},
                         {OpKind::T, b3},
                         {OpKind::W, a3},
                         {OpKind::T, b2},
                         {OpKind::W, a2},
                         {OpKind::T, b1},
                         {OpKind::W, a1}},
                        4, true);
  }
  if (name == "S6-A" || name == "S6-B" || name == "S6-C")
    return yoshida(name, k);
  if (name == "S6")
    return yoshida("S6-A", k);
  if (name == "S6star")
    return suzuki(k);
  if (name == "S6c") {
    double const c0 = k.value("S6c.c0");
    double const c1 = k.value("S6c.c1");
    double const c2 = k.value("S6c.c2");
    double const c3 = k.value("S6c.c3");
    double const c4 = k.value("S6c.c4");
    return build_scheme(name,
                        {{OpKind::W, c4},
                         {OpKind::T, c3},
                         {OpKind::W, c2},
                         {OpKind::T, c1},
                         {OpKind::W, c0},
                         {OpKind::T, c1},
                         {OpKind::W, c2},
                         {OpKind::T, c3},
                         {OpKind::W, c4}},
                        6, true);
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

Stepper::Stepper(SchemeSpec spec, SpectralCache const &cache,
                 Potential potential, double tau)
    : spec_(std::move(spec)), cache_(&cache), potential_(std::move(potential)),
      tau_(tau), fft_(cache.grid()) {
  if (tau == 0.0 || !std::isfinite(tau))
    throw std::invalid_argument("step size must be finite and nonzero");
  spec_.validate();
}

TFlow const &Stepper::t_flow(double coeff) {
  auto &slot = t_flows_[coeff];
  if (!slot)
    slot = std::make_unique<TFlow>(*cache_, coeff * tau_);
  return *slot;
}

void Stepper::apply_w(SpinorField &field, double coeff, double t_eval) {
  if (potential_.is_zero())
    return;
  if (!potential_.time_independent()) {
    apply_w_flow(field, coeff * tau_, t_eval, potential_, cache_->params());
    return;
  }
  auto &slot = w_flows_[coeff];
  if (!slot)
    slot = std::make_unique<WFlowCache>(cache_->grid(), coeff * tau_, 0.0,
                                        potential_, cache_->params());
  slot->apply(field);
}

void Stepper::step(SpinorField &field, double t_n) {
  if (!(field.grid() == cache_->grid()))
    throw std::invalid_argument("field grid does not match cache grid");
  for (auto it = spec_.steps.rbegin(); it != spec_.steps.rend(); ++it) {
    if (it->kind == OpKind::T)
      t_flow(it->coeff).apply(field, fft_);
    else
      apply_w(field, it->coeff, t_n + it->time_offset * tau_);
  }
}

void Stepper::evolve(SpinorField &field, double t0, long n_steps) {
  if (n_steps < 0)
    throw std::invalid_argument("step count must be non-negative");
  for (long n = 0; n < n_steps; ++n)
    step(field, t0 + static_cast<double>(n) * tau_);
}

SpinorField step(SpinorField field, double tau, double t_n,
                 SchemeSpec const &spec, Potential const &potential,
                 SpectralCache const &cache) {
  if (!(tau > 0.0))
    throw std::invalid_argument("step size must be positive");
  Stepper stepper(spec, cache, potential, tau);
  stepper.step(field, t_n);
  return field;
}

SpinorField evolve(SpinorField field, double tau, double t0, long n_steps,
                   SchemeSpec const &spec, Potential const &potential,
                   SpectralCache const &cache) {
  if (!(tau > 0.0))
    throw std::invalid_argument("step size must be positive");
  if (n_steps == 0)
    return field;
  Stepper stepper(spec, cache, potential, tau);
  stepper.evolve(field, t0, n_steps);
  return field;
}

} // namespace dirac6c
