#include <complex>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reflectlab/axb.hpp"
#include "reflectlab/errors.hpp"
#include "reflectlab/heisenberg.hpp"
#include "reflectlab/oskernel.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/report.hpp"
#include "reflectlab/scenarios.hpp"
#include "reflectlab/sl2series.hpp"

namespace py = pybind11;
using namespace reflectlab;

namespace {

cli::ParamValue to_param(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) throw ConfigError("boolean parameters are not supported");
  if (py::isinstance<py::int_>(v) || py::isinstance<py::float_>(v)) return v.cast<double>();
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  throw ConfigError("parameters must be numbers or strings");
}

py::dict report_dict(const cli::Report& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["seed"] = r.seed;
  d["metrics"] = r.metrics;
  d["verdicts"] = r.verdicts;
  d["artifacts"] = r.artifacts;
  d["runtime_ms"] = r.runtime_ms;
  d["passed"] = r.all_verdicts();
  d["json"] = cli::serialize(r, cli::EmitFormat::Json);
  return d;
}

}  // namespace

PYBIND11_MODULE(_reflectlab, m) {
  m.doc() = "C++ core of the reflection positivity toolkit";
  m.attr("__version__") = REFLECTLAB_VERSION;
  py::register_exception<Error>(m, "Error");

  m.def("list_scenarios", [] {
    py::dict out;
    for (const auto& s : cli::scenarios()) out[py::str(s.name)] = s.summary;
    return out;
  });

  m.def(
      "run_scenario",
      [](const std::string& name, const py::dict& params, std::uint64_t seed,
         const std::string& output) {
        cli::ScenarioConfig c;
        c.scenario = name;
        c.seed = seed;
        for (const auto& [k, v] : params) c.parameters[k.cast<std::string>()] = to_param(v);
        cli::Report r;
        {
          py::gil_scoped_release release;
          r = cli::run(c);
          if (!output.empty()) cli::write_outputs(r, output);
        }
        return report_dict(r);
      },
      py::arg("name"), py::arg("params") = py::dict(), py::arg("seed") = 42,
      py::arg("output") = "",
      "Run a scenario; returns metrics, verdicts and the serialized report. "
      "Writes report files when output is a directory path.");

  m.def("set_thread_count", &set_thread_count, py::arg("n"));

  m.def("kernel_J", &kernel_J, py::arg("x"), py::arg("y"), py::arg("s"));

  m.def(
      "jform_eigenvalues",
      [](double s, int bumps, double lo, double hi, double half_width, int order) {
        const auto basis = BasisFunctionSet::equispaced(bumps, lo, hi, half_width);
        const auto f = series::jform(s, basis, basis.default_rule(order));
        return Eigen::VectorXd(f.eigenvalues());
      },
      py::arg("s"), py::arg("bumps") = 12, py::arg("lo") = -0.8, py::arg("hi") = 0.8,
      py::arg("half_width") = 0.15, py::arg("order") = 80,
      "Ascending eigenvalues of the J-form on an equispaced bump basis.");

  m.def(
      "cayley_table",
      [](int n_max) {
        py::list out;
        for (const auto& row : cayley_table(n_max)) {
          py::dict d;
          d["space"] = row.space.name();
          d["n"] = row.space.n;
          d["R"] = row.R;
          d["Lpos"] = row.Lpos;
          out.append(d);
        }
        return out;
      },
      py::arg("n_max") = 8);

  m.def("q_from_mu", [](std::complex<double> mu) { return Eigen::Matrix2cd(axb::q_from_mu(mu)); },
        py::arg("mu"));

  m.def(
      "qfield_residuals",
      [](const Eigen::Matrix2cd& q) {
        const auto r = axb::qfield_residuals(q);
        py::dict d;
        d["idempotent"] = r.idempotent;
        d["hermitian"] = r.hermitian;
        d["qfield"] = r.qfield;
        d["trace_qjq"] = r.trace_qjq;
        d["det_qjq"] = r.det_qjq;
        return d;
      },
      py::arg("q"));

  m.def(
      "escape_time",
      [](double energy, double x0, const std::string& direction) {
        if (direction != "+" && direction != "-") throw DomainError("direction must be '+' or '-'");
        const auto r = axb::escape_time(
            energy, x0, direction == "+" ? axb::Direction::PlusInfinity : axb::Direction::MinusInfinity);
        py::dict d;
        d["diverges"] = r.diverges;
        d["value"] = r.value;
        d["slope"] = r.slope;
        d["start"] = r.start;
        d["cutoffs"] = r.cutoffs;
        d["partials"] = r.partials;
        return d;
      },
      py::arg("energy"), py::arg("x0") = 0.0, py::arg("direction") = "+");

  m.def("sublaplacian_F", [](double r, double tol) { return heis::sublaplacian_F_quadrature(r, tol); },
        py::arg("r"), py::arg("tol") = 1e-12);
}
