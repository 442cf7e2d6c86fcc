#include "dirac6c/config.hpp"

#include "dirac6c/hash.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace dirac6c {

namespace {

std::string fmt(double v) {
  char buf[40];
  auto const r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(std::string_view s) {
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  auto const last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string const &s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;)
    out.push_back(tok);
  return out;
}

// Value parsers throw std::invalid_argument with a short message.

double parse_double(std::string const &s) {
  char *end = nullptr;
  double const v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v))
    throw std::invalid_argument("expected a real number, got '" + s + "'");
  return v;
}

long long parse_int(std::string const &s) {
  char *end = nullptr;
  long long const v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0')
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

Rational parse_rational(std::string const &s) {
  using boost::multiprecision::cpp_int;
  auto digits = [&](std::string const &t) {
    if (t.empty() || !std::all_of(t.begin() + (t[0] == '-' ? 1 : 0), t.end(), ::isdigit) ||
        t == "-")
      throw std::invalid_argument("expected a rational (p/q or decimal), got '" + s + "'");
    return cpp_int(t);
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    cpp_int const den = digits(s.substr(slash + 1));
    if (den == 0)
      throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rational(digits(s.substr(0, slash)), den);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string const frac = s.substr(dot + 1);
    cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i)
      scale *= 10;
    std::string const whole = s.substr(0, dot);
    bool const neg = !whole.empty() && whole[0] == '-';
    cpp_int const w = whole.empty() || whole == "-" ? cpp_int(0) : digits(whole);
    cpp_int const f = frac.empty() ? cpp_int(0) : digits(frac);
    cpp_int const mag = (w < 0 ? -w : w) * scale + f;
    return Rational(neg ? cpp_int(-mag) : mag, scale);
  }
  return Rational(digits(s));
}

template <class T, class F> std::vector<T> parse_list(std::string const &s, F &&one) {
  std::vector<T> out;
  for (std::string const &tok : split(s))
    out.push_back(static_cast<T>(one(tok)));
  return out;
}

template <class T, class F> std::string join(std::vector<T> const &v, F &&one) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? " " : "") + one(v[i]);
  return out;
}

std::string one_of(std::string const &s, std::set<std::string> const &allowed) {
  if (!allowed.contains(s)) {
    std::string list;
    for (auto const &a : allowed)
      list += (list.empty() ? "" : ", ") + a;
    throw std::invalid_argument("expected one of {" + list + "}, got '" + s + "'");
  }
  return s;
}

std::set<std::string> scheme_names() {
  auto names = catalog_names();
  std::set<std::string> out(names.begin(), names.end());
  out.insert("S6");
  return out;
}

std::array<double, 2> parse_point(std::string const &s) {
  auto v = parse_list<double>(s, parse_double);
  if (v.size() != 2)
    throw std::invalid_argument("expected two reals 'x y'");
  return {v[0], v[1]};
}

struct KeyDef {
  char const *section;
  char const *key;
  char const *help;
  std::function<void(RunConfig &, std::string const &)> set;
  std::function<std::string(RunConfig const &)> get;
};

std::vector<KeyDef> const &schema() {
  static std::vector<KeyDef> const defs = {
      {"model", "dim", "spatial dimension, 1 or 2",
       [](RunConfig &c, std::string const &s) { c.problem.dim = static_cast<int>(parse_int(s)); },
       [](RunConfig const &c) { return std::to_string(c.problem.dim); }},
      {"model", "delta", "scaled parameter in (0, 1]",
       [](RunConfig &c, std::string const &s) { c.problem.delta = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.delta); }},
      {"model", "nu", "scaled parameter in (0, 1]",
       [](RunConfig &c, std::string const &s) { c.problem.nu = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.nu); }},
      {"model", "epsilon", "scaled parameter in (0, 1]",
       [](RunConfig &c, std::string const &s) { c.problem.epsilon = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.epsilon); }},
      {"model", "a", "left end of the interval on every axis",
       [](RunConfig &c, std::string const &s) { c.problem.a = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.a); }},
      {"model", "b", "right end of the interval on every axis",
       [](RunConfig &c, std::string const &s) { c.problem.b = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.b); }},
      {"model", "M", "grid points per axis, even",
       [](RunConfig &c, std::string const &s) { c.problem.M = static_cast<int>(parse_int(s)); },
       [](RunConfig const &c) { return std::to_string(c.problem.M); }},
      {"potential", "kind", "rational | honeycomb | zero | constant",
       [](RunConfig &c, std::string const &s) {
         c.problem.potential = one_of(s, {"rational", "honeycomb", "zero", "constant"});
       },
       [](RunConfig const &c) { return c.problem.potential; }},
      {"potential", "theta", "honeycomb rotation: constant | linear | cosine",
       [](RunConfig &c, std::string const &s) { c.problem.theta = parse_theta_mode(s); },
       [](RunConfig const &c) { return to_string(c.problem.theta); }},
      {"potential", "value", "value of the constant potential",
       [](RunConfig &c, std::string const &s) { c.problem.potential_value = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.potential_value); }},
      {"initial", "center1", "Gaussian center of the first component, 'x y'",
       [](RunConfig &c, std::string const &s) { c.problem.ic.centers[0] = parse_point(s); },
       [](RunConfig const &c) {
         return fmt(c.problem.ic.centers[0][0]) + " " + fmt(c.problem.ic.centers[0][1]);
       }},
      {"initial", "center2", "Gaussian center of the second component, 'x y'",
       [](RunConfig &c, std::string const &s) { c.problem.ic.centers[1] = parse_point(s); },
       [](RunConfig const &c) {
         return fmt(c.problem.ic.centers[1][0]) + " " + fmt(c.problem.ic.centers[1][1]);
       }},
      {"run", "scheme", "splitting scheme name",
       [](RunConfig &c, std::string const &s) { c.scheme = one_of(s, scheme_names()); },
       [](RunConfig const &c) { return c.scheme; }},
      {"run", "t_final", "final time",
       [](RunConfig &c, std::string const &s) { c.problem.t_final = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.problem.t_final); }},
      {"run", "tau", "step size for solve and converge-space",
       [](RunConfig &c, std::string const &s) { c.tau = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.tau); }},
      {"run", "taus", "step sizes for converge-time",
       [](RunConfig &c, std::string const &s) { c.taus = parse_list<double>(s, parse_double); },
       [](RunConfig const &c) { return join(c.taus, fmt); }},
      {"run", "sizes", "grid sizes M for converge-space",
       [](RunConfig &c, std::string const &s) { c.sizes = parse_list<int>(s, parse_int); },
       [](RunConfig const &c) {
         return join(c.sizes, [](int v) { return std::to_string(v); });
       }},
      {"run", "workers", "worker threads for sweeps",
       [](RunConfig &c, std::string const &s) { c.workers = static_cast<int>(parse_int(s)); },
       [](RunConfig const &c) { return std::to_string(c.workers); }},
      {"run", "seed", "seed for randomized paths",
       [](RunConfig &c, std::string const &s) {
         long long const v = parse_int(s);
         if (v < 0)
           throw std::invalid_argument("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(v);
       },
       [](RunConfig const &c) { return std::to_string(c.seed); }},
      {"reference", "scheme", "scheme of the reference solution",
       [](RunConfig &c, std::string const &s) { c.reference.scheme = one_of(s, scheme_names()); },
       [](RunConfig const &c) { return c.reference.scheme; }},
      {"reference", "tau", "reference step size",
       [](RunConfig &c, std::string const &s) { c.reference.tau = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.reference.tau); }},
      {"reference", "M", "reference grid size, 0 for the model grid",
       [](RunConfig &c, std::string const &s) { c.reference.M = static_cast<int>(parse_int(s)); },
       [](RunConfig const &c) { return std::to_string(c.reference.M); }},
      {"sweep", "mode", "resonant | nonresonant",
       [](RunConfig &c, std::string const &s) {
         c.sweep.mode = one_of(s, {"resonant", "nonresonant"}) == "resonant"
                            ? Resonance::Resonant
                            : Resonance::Nonresonant;
       },
       [](RunConfig const &c) {
         return std::string(c.sweep.mode == Resonance::Resonant ? "resonant" : "nonresonant");
       }},
      {"sweep", "tau0", "largest step, in units of pi when resonant (p/q)",
       [](RunConfig &c, std::string const &s) { c.sweep.tau0 = parse_rational(s); },
       [](RunConfig const &c) { return to_string(c.sweep.tau0); }},
      {"sweep", "factor", "step refinement factor",
       [](RunConfig &c, std::string const &s) { c.sweep.factor = static_cast<int>(parse_int(s)); },
       [](RunConfig const &c) { return std::to_string(c.sweep.factor); }},
      {"sweep", "refinements", "number of refinements",
       [](RunConfig &c, std::string const &s) {
         c.sweep.refinements = static_cast<int>(parse_int(s));
       },
       [](RunConfig const &c) { return std::to_string(c.sweep.refinements); }},
      {"sweep", "epsilons", "epsilon rows (p/q)",
       [](RunConfig &c, std::string const &s) {
         c.sweep.epsilons = parse_list<Rational>(s, parse_rational);
       },
       [](RunConfig const &c) {
         return join(c.sweep.epsilons, [](Rational const &r) { return to_string(r); });
       }},
      {"sweep", "scheme", "scheme under study",
       [](RunConfig &c, std::string const &s) { c.sweep.scheme = one_of(s, scheme_names()); },
       [](RunConfig const &c) { return c.sweep.scheme; }},
      {"sweep", "reference_scheme", "scheme of the per-epsilon references",
       [](RunConfig &c, std::string const &s) {
         c.sweep.reference_scheme = one_of(s, scheme_names());
       },
       [](RunConfig const &c) { return c.sweep.reference_scheme; }},
      {"sweep", "ref_tau_max", "upper bound of the reference step",
       [](RunConfig &c, std::string const &s) { c.sweep.ref_tau_max = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.sweep.ref_tau_max); }},
      {"sweep", "ref_eps2_ratio", "reference step bound as a multiple of epsilon^2",
       [](RunConfig &c, std::string const &s) { c.sweep.ref_eps2_ratio = parse_double(s); },
       [](RunConfig const &c) { return fmt(c.sweep.ref_eps2_ratio); }},
      {"output", "csv", "CSV path; empty writes to standard output",
       [](RunConfig &c, std::string const &s) { c.csv = s; },
       [](RunConfig const &c) { return c.csv; }},
      {"output", "gnuplot", "gnuplot script path; empty disables",
       [](RunConfig &c, std::string const &s) { c.gnuplot = s; },
       [](RunConfig const &c) { return c.gnuplot; }},
      {"output", "dump", "final-state dump path for solve",
       [](RunConfig &c, std::string const &s) { c.dump = s; },
       [](RunConfig const &c) { return c.dump; }},
      {"output", "cache_dir", "reference cache directory; empty uses DIRAC6C_CACHE_DIR",
       [](RunConfig &c, std::string const &s) { c.cache_dir = s; },
       [](RunConfig const &c) { return c.cache_dir; }},
  };
  return defs;
}

RunConfig defaults() {
  RunConfig c;
  c.problem = desk_rational_1d(1.0);
  c.taus = {0.1, 0.05, 0.025, 0.0125};
  c.sizes = {64, 128, 256};
  c.reference = {"S6c", 1e-3, 0};
  c.sweep.mode = Resonance::Resonant;
  c.sweep.tau0 = Rational(1, 2);
  c.sweep.factor = 4;
  c.sweep.refinements = 4;
  for (int k = 0; k <= 5; ++k)
    c.sweep.epsilons.push_back(Rational(1, 1 << k));
  return c;
}

void validate(RunConfig const &c, std::map<std::string, int> const &lines) {
  auto fail = [&](std::string const &key, std::string const &msg) {
    auto it = lines.find(key);
    throw ConfigError(it == lines.end() ? 0 : it->second, key, msg);
  };
  ProblemConfig const &p = c.problem;
  if (p.dim != 1 && p.dim != 2)
    fail("model.dim", "dim must be 1 or 2");
  for (auto [key, v] : {std::pair{"model.delta", p.delta}, std::pair{"model.nu", p.nu},
                        std::pair{"model.epsilon", p.epsilon}})
    if (!(v > 0.0 && v <= 1.0))
      fail(key, std::string(key).substr(6) + " must lie in (0, 1]");
  if (!(p.a < p.b))
    fail("model.b", "domain requires a < b");
  if (p.M < 2 || p.M % 2 != 0)
    fail("model.M", "M must be even");
  if (p.potential == "rational" && p.dim != 1)
    fail("potential.kind", "the rational potential is one-dimensional");
  if (!(p.t_final > 0.0))
    fail("run.t_final", "t_final must be positive");
  if (!(c.tau > 0.0))
    fail("run.tau", "tau must be positive");
  for (double t : c.taus)
    if (!(t > 0.0))
      fail("run.taus", "every step size must be positive");
  for (int m : c.sizes)
    if (m < 2 || m % 2 != 0)
      fail("run.sizes", "every grid size must be even");
  if (c.workers < 1)
    fail("run.workers", "workers must be at least 1");
  if (!(c.reference.tau > 0.0))
    fail("reference.tau", "reference tau must be positive");
  if (c.reference.M < 0 || c.reference.M % 2 != 0)
    fail("reference.M", "reference M must be even (0 for the model grid)");
  if (c.sweep.refinements < 3)
    fail("sweep.refinements", "refinements must be at least 3");
  if (c.sweep.factor < 2)
    fail("sweep.factor", "factor must be at least 2");
  if (c.sweep.tau0 <= 0)
    fail("sweep.tau0", "tau0 must be positive");
  for (Rational const &e : c.sweep.epsilons)
    if (e <= 0 || e > 1)
      fail("sweep.epsilons", "every epsilon must lie in (0, 1]");
  if (!(c.sweep.ref_tau_max > 0.0))
    fail("sweep.ref_tau_max", "must be positive");
  if (!(c.sweep.ref_eps2_ratio > 0.0))
    fail("sweep.ref_eps2_ratio", "must be positive");
}

} // namespace

ConfigError::ConfigError(int line, std::string key, std::string const &message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? std::string() : key + ": ") + message),
      line_(line), key_(std::move(key)) {}

RunConfig parse_config(std::string_view text) {
  RunConfig c = defaults();
  std::set<std::string> sections;
  for (auto const &d : schema())
    sections.insert(d.section);
  std::map<std::string, int> lines;
  std::istringstream in{std::string(text)};
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string const line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(lineno, "", "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!sections.contains(section))
        throw ConfigError(lineno, section, "unknown section");
      continue;
    }
    auto const eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "", "expected `key = value`");
    std::string const key = trim(std::string_view(line).substr(0, eq));
    std::string const value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty())
      throw ConfigError(lineno, key, "key outside any section");
    std::string const full = section + "." + key;
    auto it = std::find_if(schema().begin(), schema().end(), [&](KeyDef const &d) {
      return section == d.section && key == d.key;
    });
    if (it == schema().end())
      throw ConfigError(lineno, full, "unknown key");
    if (lines.contains(full))
      throw ConfigError(lineno, full, "duplicate key (first set on line " +
                                          std::to_string(lines[full]) + ")");
    try {
      it->set(c, value);
    } catch (std::invalid_argument const &e) {
      throw ConfigError(lineno, full, e.what());
    }
    lines[full] = lineno;
  }
  validate(c, lines);
  return c;
}

RunConfig load_config(std::string const &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, "", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  std::string section;
  for (auto const &d : schema()) {
    if (section != d.section) {
      section = d.section;
      os << (os.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    os << d.key << " = " << d.get(*this) << '\n';
  }
  return os.str();
}

std::string RunConfig::hash() const { return Fnv1a().update(echo()).hex(); }

std::string RunConfig::resolved_cache_dir() const {
  return cache_dir.empty() ? default_cache_dir() : cache_dir;
}

std::string config_schema_text() {
  RunConfig const d = defaults();
  std::ostringstream os;
  for (auto const &k : schema()) {
    std::string const name = std::string(k.section) + "." + k.key;
    std::string def = k.get(d);
    os << name << std::string(name.size() < 26 ? 26 - name.size() : 1, ' ')
       << (def.empty() ? "\"\"" : def) << "\n    " << k.help << '\n';
  }
  return os.str();
}

} // namespace dirac6c
