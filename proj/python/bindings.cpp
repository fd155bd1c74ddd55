#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "expkant/error.hpp"
#include "expkant/experiments.hpp"
#include "expkant/mellin.hpp"
#include "expkant/modular.hpp"
#include "expkant/moduli.hpp"
#include "expkant/moments.hpp"
#include "expkant/operator.hpp"
#include "expkant/parallel.hpp"
#include "expkant/rate_fit.hpp"
#include "expkant/signals.hpp"

namespace py = pybind11;
using namespace expkant;

namespace {

std::map<std::string, double> to_params(const py::kwargs& kw) {
  std::map<std::string, double> p;
  for (const auto& [k, v] : kw) p[py::cast<std::string>(k)] = py::cast<double>(v);
  return p;
}

py::dict moment_dict(const MomentReport& m) {
  py::dict d;
  d["beta"] = m.beta;
  d["value"] = m.value;
  d["upper"] = m.upper;
  d["at_phase"] = m.at_phase;
  d["diverged"] = m.diverged;
  return d;
}

py::object json_to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlinear exponential Kantorovich sampling operators";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);

  py::class_<SamplingScheme>(m, "SamplingScheme")
      .def_static("uniform", &SamplingScheme::uniform, py::arg("step") = 1.0, py::arg("offset") = 0.0)
      .def_static("tabulated", &SamplingScheme::tabulated, py::arg("nodes"))
      .def("node", &SamplingScheme::node)
      .def_property_readonly("lower_gap", &SamplingScheme::lower_gap)
      .def_property_readonly("upper_gap", &SamplingScheme::upper_gap)
      .def("__repr__", &SamplingScheme::describe);

  py::class_<KernelProfile>(m, "KernelProfile")
      .def("__call__", &KernelProfile::operator(), py::arg("x"))
      .def("at_log", &KernelProfile::at_log, py::arg("v"))
      .def_property_readonly("name", &KernelProfile::name)
      .def_property_readonly("l1_log_norm", &KernelProfile::l1_log_norm)
      .def_property_readonly("is_compact", &KernelProfile::is_compact);
  m.def("make_profile", &make_builtin_profile, py::arg("name"), py::arg("order") = 2);

  py::class_<ResponseFamily>(m, "ResponseFamily")
      .def("__call__", &ResponseFamily::operator(), py::arg("w"), py::arg("u"))
      .def_readonly("name", &ResponseFamily::name)
      .def_readonly("deviation_rate", &ResponseFamily::deviation_rate);
  m.def("make_response", &make_response, py::arg("name"), py::arg("alpha") = 1.0, py::arg("r") = 1.0);

  py::class_<Signal>(m, "Signal")
      .def("__call__", &Signal::operator(), py::arg("x"))
      .def("at_log", [](const Signal& f, double v) { return f.at_log(v); }, py::arg("v"))
      .def_readonly("name", &Signal::name)
      .def_readonly("sup_norm", &Signal::sup_norm)
      .def_property_readonly("continuous", &Signal::continuous);
  m.def("make_signal", [](const std::string& name, const py::kwargs& kw) {
    return make_builtin_signal(name, to_params(kw));
  }, py::arg("name"));

  py::class_<KantorovichOperator>(m, "KantorovichOperator")
      .def(py::init([](const KernelProfile& p, const ResponseFamily& g, const SamplingScheme& s) {
             return KantorovichOperator(NonlinearKernel{p, g}, s);
           }),
           py::arg("profile"), py::arg("response"), py::arg("scheme"))
      .def("evaluate", [](const KantorovichOperator& op, const Signal& f, double w, double x) {
        return op.evaluate(f, w, x).value;
      }, py::arg("f"), py::arg("w"), py::arg("x"))
      .def("evaluate_log", [](const KantorovichOperator& op, const Signal& f, double w,
                              py::array_t<double, py::array::c_style | py::array::forcecast> vs) {
        std::vector<double> v(vs.data(), vs.data() + vs.size());
        std::vector<EvalResult> r;
        {
          py::gil_scoped_release release;
          r = op.evaluate_many_log(f, w, v);
        }
        py::array_t<double> out(static_cast<py::ssize_t>(r.size()));
        auto o = out.mutable_unchecked<1>();
        for (std::size_t i = 0; i < r.size(); ++i) o(i) = r[i].value;
        return out;
      }, py::arg("f"), py::arg("w"), py::arg("vs"))
      .def("sup_error_log", [](const KantorovichOperator& op, const Signal& f, double w,
                               const std::vector<double>& vs) {
        py::gil_scoped_release release;
        return op.sup_error_log(f, w, vs).value;
      }, py::arg("f"), py::arg("w"), py::arg("vs"))
      .def("moment_bound", &KantorovichOperator::moment_bound, py::arg("beta"));

  m.def("discrete_moment", [](const KernelProfile& p, const SamplingScheme& s, double beta, double w) {
    return moment_dict(discrete_moment(p, s, beta, w));
  }, py::arg("profile"), py::arg("scheme"), py::arg("beta"), py::arg("w") = 1.0);

  m.def("log_modulus", [](const Signal& f, double delta) { return log_modulus(f, delta); },
        py::arg("f"), py::arg("delta"));

  m.def("modular", [](const std::string& phi, double p, const Signal& f, double lambda) {
    return modular(make_phi(phi, p), f, lambda).value;
  }, py::arg("phi"), py::arg("p"), py::arg("f"), py::arg("lam"));

  m.def("mellin_derivative", [](const Signal& f, double x) {
    const MellinDerivative d = mellin_derivative(f, x);
    return py::make_tuple(d.value, d.differentiable);
  }, py::arg("f"), py::arg("x"));

  m.def("fit_rate", [](const std::vector<double>& ws, const std::vector<double>& errs) {
    const RateFit r = fit_rate(ws, errs);
    py::dict d;
    d["exact"] = r.exact;
    d["slope"] = r.slope;
    d["intercept"] = r.intercept;
    d["r_squared"] = r.r_squared;
    d["points_used"] = r.points_used;
    return d;
  }, py::arg("ws"), py::arg("errors"));

  m.def("run_experiment", [](const std::string& config_json) {
    Json doc;
    try {
      doc = Json::parse(config_json);
    } catch (const Json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    const ExperimentConfig cfg = parse_config(doc);
    ExperimentOutcome o;
    {
      py::gil_scoped_release release;
      o = run_experiment(cfg);
    }
    return py::make_tuple(o.passed, json_to_py(o.report));
  }, py::arg("config_json"), "Runs an experiment from a JSON string; returns (passed, report).");

  m.def("set_worker_count", &set_worker_count, py::arg("n"));
}
