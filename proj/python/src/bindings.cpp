#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msmbias/bias.hpp"
#include "msmbias/json_io.hpp"
#include "msmbias/sensitivity.hpp"
#include "msmbias/simulation.hpp"

namespace py = pybind11;
using namespace msmbias;

namespace {

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

std::string json_dumps(const py::object& obj) {
  return py::module_::import("json").attr("dumps")(obj).cast<std::string>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bias in treatment effect estimators from a misclassified binary confounder.";

  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::object err = py::handle(domain_error.ptr())(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(domain_error.ptr(), err.ptr());
    }
  });

  py::class_<LatentParams>(m, "LatentParams")
      .def(py::init([](double lambda, double pi0, double pi1, double p0, double p1, double gamma,
                       double alpha, double beta, double sigma) {
             return LatentParams{lambda, pi0, pi1, p0, p1, alpha, beta, gamma, sigma};
           }),
           py::arg("lambda_"), py::arg("pi0"), py::arg("pi1"), py::arg("p0"), py::arg("p1"),
           py::arg("gamma"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0,
           py::arg("sigma") = 1.0)
      .def_readwrite("lambda_", &LatentParams::lambda)
      .def_readwrite("pi0", &LatentParams::pi0)
      .def_readwrite("pi1", &LatentParams::pi1)
      .def_readwrite("p0", &LatentParams::p0)
      .def_readwrite("p1", &LatentParams::p1)
      .def_readwrite("alpha", &LatentParams::alpha)
      .def_readwrite("beta", &LatentParams::beta)
      .def_readwrite("gamma", &LatentParams::gamma)
      .def_readwrite("sigma", &LatentParams::sigma);

  py::class_<ObservedSummary>(m, "ObservedSummary")
      .def(py::init<double, double, double, double>(), py::arg("ell"), py::arg("omega"),
           py::arg("pi_star0"), py::arg("pi_star1"))
      .def_readwrite("ell", &ObservedSummary::ell)
      .def_readwrite("omega", &ObservedSummary::omega)
      .def_readwrite("pi_star0", &ObservedSummary::pi_star0)
      .def_readwrite("pi_star1", &ObservedSummary::pi_star1);

  py::class_<BiasPair>(m, "BiasPair")
      .def_readonly("bias_cm", &BiasPair::bias_cm)
      .def_readonly("bias_msm", &BiasPair::bias_msm);

  py::class_<InvertedParams>(m, "InvertedParams")
      .def_readonly("lambda_", &InvertedParams::lambda)
      .def_readonly("pi0", &InvertedParams::pi0)
      .def_readonly("pi1", &InvertedParams::pi1);

  m.def("bias_conditional", &bias_conditional, py::arg("params"));
  m.def("bias_msm", &bias_msm, py::arg("params"));
  m.def("bias_pair", &bias_pair, py::arg("params"));
  m.def("implied_observables", &implied_observables, py::arg("params"));
  m.def("invert_observables", &invert_observables, py::arg("observed"), py::arg("p0"),
        py::arg("p1"), py::arg("omega_tolerance") = kDefaultOmegaTolerance);

  m.def(
      "bias_curve",
      [](const LatentParams& p, const std::string& parameter, const std::vector<double>& grid) {
        const auto req_json = io::json{{"params", io::to_json(p)},
                                       {"parameter", parameter},
                                       {"grid", grid}};
        return json_loads(io::curve_response(io::curve_request_from_json(req_json)).dump());
      },
      py::arg("params"), py::arg("parameter"), py::arg("grid"),
      "Bias of both estimators along a grid of one parameter; undefined points are None.");

  m.def(
      "sensitivity",
      [](const py::dict& config) {
        const auto cfg = io::sensitivity_config_from_json(io::json::parse(json_dumps(config)));
        SensitivityReport report;
        {
          py::gil_scoped_release release;
          report = run_sensitivity(cfg);
        }
        return json_loads(io::sensitivity_response(cfg, report).dump());
      },
      py::arg("config"));

  m.def(
      "simulate",
      [](const std::string& scenario, int n, int reps, std::uint64_t seed, unsigned workers) {
        Scenario s = find_scenario(builtin_scenarios(), scenario);
        s.n = n;
        s.reps = reps;
        s.seed = seed;
        SimulationReport report;
        {
          py::gil_scoped_release release;
          report = run_scenario(s, {workers, Adjustment::lstar});
        }
        return json_loads(io::to_json(report).dump());
      },
      py::arg("scenario"), py::arg("n") = 1000, py::arg("reps") = 5000,
      py::arg("seed") = 20200101, py::arg("workers") = 0);
}
