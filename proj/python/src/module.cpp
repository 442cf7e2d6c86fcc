#include "dirac6c/cli.hpp"
#include "dirac6c/config.hpp"
#include "dirac6c/harness.hpp"
#include "dirac6c/lie.hpp"
#include "dirac6c/schemes.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace dirac6c;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> field_shape(Grid const &g) {
  if (g.dim() == 1)
    return {g.axis(0).M, 2};
  return {g.axis(0).M, g.axis(1).M, 2};
}

ComplexArray to_array(SpinorField const &f) {
  ComplexArray out(field_shape(f.grid()));
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

SpinorField from_array(Grid const &g, ComplexArray const &a) {
  if (a.ndim() != g.dim() + 1 || a.shape(a.ndim() - 1) != 2 ||
      static_cast<std::size_t>(a.size()) != 2 * g.size())
    throw std::invalid_argument("array shape does not match the problem grid");
  return SpinorField(g, std::vector<cplx>(a.data(), a.data() + a.size()));
}

py::dict record_dict(ErrorRecord const &r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["h"] = r.h;
  d["tau"] = r.tau;
  d["epsilon"] = r.epsilon;
  d["t_final"] = r.t_final;
  d["e_phi"] = r.e_phi;
  d["e_rho"] = r.e_rho;
  d["e_J"] = r.e_J;
  d["mass_drift"] = r.mass_drift;
  d["wall_time"] = r.wall_time;
  d["rate"] = r.rate;
  return d;
}

py::object fit_value(OrderFit const &f) {
  return f.order ? py::object(py::float_(*f.order)) : py::none();
}

py::dict newton_dict(NewtonReport const &r) {
  py::dict d;
  d["solution"] = r.solution;
  d["residual"] = r.residual;
  d["residual_norm"] = r.residual_norm;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["singular"] = r.singular;
  d["message"] = r.message;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Splitting integrators for the Dirac equation in the nonrelativistic regime";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ProblemConfig>(m, "Problem")
      .def(py::init<>())
      .def_readwrite("dim", &ProblemConfig::dim)
      .def_readwrite("delta", &ProblemConfig::delta)
      .def_readwrite("nu", &ProblemConfig::nu)
      .def_readwrite("epsilon", &ProblemConfig::epsilon)
      .def_readwrite("a", &ProblemConfig::a)
      .def_readwrite("b", &ProblemConfig::b)
      .def_readwrite("M", &ProblemConfig::M)
      .def_readwrite("potential", &ProblemConfig::potential)
      .def_readwrite("potential_value", &ProblemConfig::potential_value)
      .def_readwrite("t_final", &ProblemConfig::t_final)
      .def_property(
          "theta", [](ProblemConfig const &p) { return to_string(p.theta); },
          [](ProblemConfig &p, std::string const &s) { p.theta = parse_theta_mode(s); })
      .def_property(
          "centers", [](ProblemConfig const &p) { return p.ic.centers; },
          [](ProblemConfig &p, std::array<std::array<double, 2>, 2> const &c) {
            p.ic.centers = c;
          })
      .def("validate", &ProblemConfig::validate)
      .def("canonical", &ProblemConfig::canonical)
      .def("initial", [](ProblemConfig const &p) { return to_array(p.initial(p.grid())); })
      .def("nodes",
           [](ProblemConfig const &p) {
             Grid const g = p.grid();
             std::vector<double> x(g.axis(0).M);
             for (int j = 0; j < g.axis(0).M; ++j)
               x[j] = g.axis(0).node(j);
             return x;
           })
      .def("__repr__", [](ProblemConfig const &p) { return "<Problem " + p.canonical() + ">"; });

  m.def("desk_rational_1d", &desk_rational_1d, py::arg("epsilon") = 1.0);
  m.def(
      "desk_honeycomb",
      [](std::string const &theta) { return desk_honeycomb(parse_theta_mode(theta)); },
      py::arg("theta") = "constant");

  m.def("catalog_names", &catalog_names);
  m.def("op_count", [](std::string const &name) {
    OpCount const c = op_count(catalog(name));
    return py::make_tuple(c.t, c.w);
  });
  m.def("scheme_steps", [](std::string const &name) {
    py::list out;
    for (SchemeStep const &s : catalog(name).steps)
      out.append(py::make_tuple(s.kind == OpKind::T ? "T" : "W", s.coeff, s.time_offset));
    return out;
  });

  m.def(
      "propagate",
      [](ProblemConfig const &p, std::string const &scheme, double tau) {
        std::optional<Propagation> r;
        {
          py::gil_scoped_release release;
          r = propagate(p, p.grid(), catalog(scheme), tau);
        }
        return py::make_tuple(to_array(r->field), r->wall_time);
      },
      py::arg("problem"), py::arg("scheme"), py::arg("tau"));

  m.def("mass", [](ProblemConfig const &p, ComplexArray const &a) {
    return mass(from_array(p.grid(), a));
  });
  m.def("error_metrics",
        [](ProblemConfig const &p, ComplexArray const &numeric, ComplexArray const &reference) {
          ErrorTriple const e =
              error_metrics(from_array(p.grid(), numeric), from_array(p.grid(), reference));
          py::dict d;
          d["e_phi"] = e.e_phi;
          d["e_rho"] = e.e_rho;
          d["e_J"] = e.e_J;
          return d;
        });
  m.def("mass_series", &mass_series, py::arg("scheme"), py::arg("problem"), py::arg("tau"),
        py::arg("n_steps"), py::call_guard<py::gil_scoped_release>());
  m.def("fit_order", [](std::vector<double> const &taus, std::vector<double> const &errs,
                        double floor) { return fit_value(fit_order(taus, errs, floor)); });

  m.def(
      "temporal_convergence",
      [](std::string const &scheme, std::vector<double> const &taus, ProblemConfig const &p,
         std::string const &ref_scheme, double ref_tau, int ref_M, std::string const &cache_dir) {
        ConvergenceStudy s;
        {
          py::gil_scoped_release release;
          s = temporal_convergence(scheme, taus, p, {ref_scheme, ref_tau, ref_M},
                                   {1, cache_dir});
        }
        py::dict d;
        py::list recs;
        for (ErrorRecord const &r : s.records)
          recs.append(record_dict(r));
        d["records"] = recs;
        d["floor"] = s.floor;
        d["order_phi"] = fit_value(s.fit_phi);
        d["order_rho"] = fit_value(s.fit_rho);
        d["order_J"] = fit_value(s.fit_J);
        return d;
      },
      py::arg("scheme"), py::arg("taus"), py::arg("problem"), py::arg("ref_scheme") = "S6c",
      py::arg("ref_tau") = 1e-3, py::arg("ref_M") = 0, py::arg("cache_dir") = "");

  m.def("constant", [](std::string const &name) { return builtin_constants().value(name); });
  m.def(
      "newton_solve",
      [](Coeffs const &seed, double tol, int max_iter) {
        return newton_dict(newton_solve(seed, tol, max_iter));
      },
      py::arg("seed"), py::arg("tol") = 1e-14, py::arg("max_iter") = 100);
  m.def("residuals", &residuals);
  m.def("residuals_extended", &residuals_extended);
  m.def("lie_checks", [] {
    py::list out;
    for (LieCheck const &c : run_lie_checks())
      out.append(py::make_tuple(c.name, c.pass, c.detail));
    return out;
  });

  m.def("config_hash", [](std::string const &text) { return parse_config(text).hash(); });
  m.def("config_echo", [](std::string const &text) { return parse_config(text).echo(); });
  m.def("config_schema", &config_schema_text);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "dirac6c");
    std::vector<char const *> argv;
    for (auto const &a : args)
      argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });

  m.attr("CSV_HEADER") = kCsvHeader;
  m.attr("EXIT_OK") = kExitOk;
  m.attr("EXIT_VALIDATION") = kExitValidation;
  m.attr("EXIT_NUMERICAL") = kExitNumerical;
}
