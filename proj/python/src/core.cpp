#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <pybind11/iostream.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kirchhoff/app.hpp"
#include "kirchhoff/asymptotics.hpp"
#include "kirchhoff/diagnostics.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/integrator.hpp"

namespace py = pybind11;
using namespace kirchhoff;

namespace {

py::array_t<double> column(const Trace& tr, double Sample::*field) {
  py::array_t<double> out(static_cast<py::ssize_t>(tr.size()));
  auto a = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < tr.size(); ++i) a(i) = tr[i].*field;
  return out;
}

py::array_t<double> matrix(const Trace& tr, Vector Sample::*field) {
  const std::size_t n = tr.info().spectrum.size();
  py::array_t<double> out({tr.size(), n});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (std::size_t k = 0; k < n; ++k) a(i, k) = (tr[i].*field)[k];
  }
  return out;
}

py::dict claim_dict(const Claim& c) {
  static const std::map<ClaimKind, const char*> kinds = {{ClaimKind::Limit, "limit"},
                                                         {ClaimKind::Bound, "bound"},
                                                         {ClaimKind::Check, "check"},
                                                         {ClaimKind::Positive, "positive"},
                                                         {ClaimKind::Info, "info"}};
  py::dict d;
  d["id"] = c.id;
  d["kind"] = kinds.at(c.kind);
  d["predicted"] = c.predicted;
  d["measured"] = c.measured;
  d["half_window"] = c.half_window;
  d["spread"] = c.spread;
  d["slope"] = c.slope;
  d["lower"] = c.lower;
  d["upper"] = c.upper;
  d["two_sided"] = c.two_sided;
  d["tolerance"] = c.tolerance;
  d["pass"] = c.pass;
  d["insufficient_tail"] = c.insufficient_tail;
  d["note"] = c.note;
  return d;
}

py::dict report_dict(const VerificationReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["pass"] = r.all_pass();
  py::list claims;
  for (const auto& c : r.claims) claims.append(claim_dict(c));
  d["claims"] = claims;
  py::dict meta;
  for (const auto& [k, v] : r.metadata) meta[py::str(k)] = v;
  d["metadata"] = meta;
  return d;
}

VerifySettings settings(std::optional<double> tolerance, double slope_tolerance,
                        double window_decades) {
  VerifySettings s;
  s.tolerance = tolerance;
  s.slope_tolerance = slope_tolerance;
  s.window_decades = window_decades;
  return s;
}

StepController controller(double eta_b) {
  StepController c;
  c.eta_b = eta_b;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral simulator and verification harness for the dissipative Kirchhoff equation";

  auto base = py::register_exception<Error>(m, "KirchhoffError", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<InsufficientTail>(m, "InsufficientTailError", base.ptr());

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("eigenvalues",
                             [](const Problem& p) {
                               const auto& f = p.spectrum().frequencies();
                               return Vector(f.begin(), f.end());
                             })
      .def_property_readonly("gamma", &Problem::gamma)
      .def_property_readonly("epsilon", &Problem::epsilon)
      .def_property_readonly("u0", &Problem::u0)
      .def_property_readonly("u1", &Problem::u1)
      .def_property_readonly("nu", &Problem::nu)
      .def_property_readonly("b0", &Problem::b0)
      .def("__len__", &Problem::size);

  m.def("build_problem", &build_problem, py::arg("eigenvalues"), py::arg("gamma"),
        py::arg("epsilon"), py::arg("u0"), py::arg("u1"),
        "Validated problem; modes are sorted by frequency together with their data.");

  py::class_<Trace>(m, "Trace")
      .def("__len__", &Trace::size)
      .def_property_readonly("kind",
                             [](const Trace& t) {
                               return t.info().kind == TraceKind::Linear ? "linear" : "nonlinear";
                             })
      .def_property_readonly("nu", [](const Trace& t) { return t.info().nu; })
      .def_property_readonly("t", [](const Trace& t) { return column(t, &Sample::t); })
      .def_property_readonly("b", [](const Trace& t) { return column(t, &Sample::b); })
      .def_property_readonly("B", [](const Trace& t) { return column(t, &Sample::B); })
      .def_property_readonly("u", [](const Trace& t) { return matrix(t, &Sample::u); })
      .def_property_readonly("v", [](const Trace& t) { return matrix(t, &Sample::v); })
      .def_property_readonly("accel", [](const Trace& t) { return matrix(t, &Sample::accel); })
      .def("lyapunov_energy", [](const Trace& t) {
        Vector out;
        for (const Sample& s : t.samples()) out.push_back(lyapunov_energy(t.info(), s));
        return out;
      });

  m.def(
      "evolve",
      [](const Problem& p, double t_end, double eta_b, int samples_per_decade, double t_first) {
        py::gil_scoped_release release;
        return evolve(p, t_end, controller(eta_b),
                      SamplingPolicy{.samples_per_decade = samples_per_decade, .t_first = t_first});
      },
      py::arg("problem"), py::arg("t_end"), py::arg("eta_b") = 1e-3,
      py::arg("samples_per_decade") = 20, py::arg("t_first") = 1e-3);

  m.def(
      "evolve_linear",
      [](const Vector& eigenvalues, const std::string& coefficient, double K, double p,
         double epsilon, Vector v0, Vector v1, double t_end, double eta_b) {
        LinearCoefficient c = coefficient == "constant" ? LinearCoefficient::constant(K)
                              : coefficient == "power"
                                  ? LinearCoefficient::power(K, p)
                                  : throw InvalidInput("coefficient must be 'power' or 'constant'");
        py::gil_scoped_release release;
        return evolve_linear(Spectrum(eigenvalues), c, epsilon, std::move(v0), std::move(v1),
                             t_end, controller(eta_b));
      },
      py::arg("eigenvalues"), py::arg("coefficient"), py::arg("K"), py::arg("p"),
      py::arg("epsilon"), py::arg("v0"), py::arg("v1"), py::arg("t_end"),
      py::arg("eta_b") = 1e-3);

  m.def(
      "reference_solve",
      [](const Problem& p, double t_end, double tol) {
        py::gil_scoped_release release;
        return reference_solve(p, t_end, tol);
      },
      py::arg("problem"), py::arg("t_end"), py::arg("tol") = 1e-12);

  m.def("limit_ode_solution", &limit_ode_solution, py::arg("t"), py::arg("y0"), py::arg("gamma"),
        py::arg("nu"));

  m.def(
      "predict_limits",
      [](double gamma, double nu) {
        const LimitPredictions p = predict_limits(gamma, nu);
        py::dict d;
        d["b"] = p.b;
        d["u_nu"] = p.u_nu;
        d["a12u"] = p.a12u;
        d["au"] = p.au;
        d["du"] = p.du;
        d["a12du"] = p.a12du;
        return d;
      },
      py::arg("gamma"), py::arg("nu"));

  m.def(
      "verify_theorem_A",
      [](const Trace& t, std::optional<double> tol, double slope, double w) {
        return report_dict(verify_theorem_A(t, settings(tol, slope, w)));
      },
      py::arg("trace"), py::arg("tolerance") = py::none(), py::arg("slope_tolerance") = 0.05,
      py::arg("window_decades") = 1.0);
  m.def(
      "verify_theorem_1",
      [](const Trace& t, const Vector& lambdas, std::optional<double> tol, double slope, double w) {
        return report_dict(verify_theorem_1(t, lambdas, settings(tol, slope, w)));
      },
      py::arg("trace"), py::arg("lambdas"), py::arg("tolerance") = py::none(),
      py::arg("slope_tolerance") = 0.05, py::arg("window_decades") = 1.0);
  m.def(
      "verify_theorem_2",
      [](const Trace& t, std::optional<double> tol, double slope, double w) {
        return report_dict(verify_theorem_2(t, settings(tol, slope, w)));
      },
      py::arg("trace"), py::arg("tolerance") = py::none(), py::arg("slope_tolerance") = 0.05,
      py::arg("window_decades") = 1.0);
  m.def(
      "verify_proposition_3",
      [](const Trace& t, std::optional<double> tol, double slope, double w) {
        return report_dict(verify_proposition_3(t, settings(tol, slope, w)));
      },
      py::arg("trace"), py::arg("tolerance") = py::none(), py::arg("slope_tolerance") = 0.05,
      py::arg("window_decades") = 1.0);
  m.def(
      "verify_propositions",
      [](const Trace& t, double sigma_M, std::optional<double> tol, double slope, double w) {
        return report_dict(verify_propositions(t, sigma_M, settings(tol, slope, w)));
      },
      py::arg("trace"), py::arg("sigma_M"), py::arg("tolerance") = py::none(),
      py::arg("slope_tolerance") = 0.05, py::arg("window_decades") = 1.0);

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "kirchhoff");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        py::scoped_ostream_redirect out;
        py::scoped_estream_redirect err;
        return app::main(static_cast<int>(argv.size()), argv.data(), std::cout, std::cerr);
      },
      py::arg("args"), "Runs the command-line tool and returns its exit code.");
}
