#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "socp/auglag.hpp"
#include "socp/cli.hpp"
#include "socp/cone.hpp"
#include "socp/sqp.hpp"

namespace py = pybind11;
using namespace socp;

namespace {

std::vector<std::string> settings_to_kv(const py::dict& settings) {
  std::vector<std::string> kv;
  for (const auto& [k, v] : settings) {
    std::string value;
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      for (const auto& e : v) value += (value.empty() ? "" : ",") + py::str(e).cast<std::string>();
    } else {
      value = py::str(v).cast<std::string>();
    }
    kv.push_back(py::str(k).cast<std::string>() + "=" + value);
  }
  return kv;
}

py::dict result_dict(const Vector& x, const Vector& mu, const Vector& omega, SolveStatus status, const Trace& trace,
                     const Akkt2Certificate& cert) {
  py::dict d;
  d["x"] = x;
  d["mu"] = mu;
  d["omega"] = omega;
  d["status"] = to_string(status);
  d["trace_json"] = trace.to_json();
  d["certificate_json"] = cert.to_json();
  return d;
}

}  // namespace

PYBIND11_MODULE(_socp, m) {
  m.doc() = "Second-order cone constrained optimization";

  py::register_exception<cli::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);

  m.def("builtin_names", &builtin_names);

  py::class_<Problem>(m, "Problem")
      .def_static("builtin", &builtin, py::arg("name"))
      .def_static("from_spec_file", [](const std::string& path) { return Problem(load_problem_spec(path)); },
                  py::arg("path"))
      .def_static("from_spec_json", [](const std::string& text) { return Problem(parse_problem_spec(text)); },
                  py::arg("text"))
      .def_property_readonly("name", &Problem::name)
      .def_property_readonly("n", &Problem::n)
      .def_property_readonly("p", &Problem::p)
      .def_property_readonly("m", &Problem::m)
      .def_property_readonly("cone_dims", [](const Problem& p) { return p.cone().dims(); })
      .def_property_readonly("start", &Problem::start)
      .def("f", [](const Problem& p, const Vector& x) { return p.f(x); })
      .def("grad_f", [](const Problem& p, const Vector& x) { return p.grad_f(x); })
      .def("g", [](const Problem& p, const Vector& x) { return p.g(x); })
      .def("h", [](const Problem& p, const Vector& x) { return p.h(x); })
      .def("__repr__", [](const Problem& p) { return "<Problem " + p.name() + ">"; });

  m.def(
      "project_cone",
      [](const std::vector<std::size_t>& dims, const Vector& z) { return project_cone(ConeProduct(dims), z); },
      py::arg("dims"), py::arg("z"));

  m.def(
      "residuals",
      [](const Problem& p, const Vector& x, const Vector& mu, const Vector& omega) {
        cli::validate_omega(p.cone(), omega);
        const FirstOrderResiduals r = first_order_residuals(p, x, mu, omega);
        py::dict d;
        d["stationarity"] = r.stationarity;
        d["r_V"] = r.feasibility;
        d["akkt_comp"] = r.akkt_comp;
        d["cakkt_comp"] = r.cakkt_comp;
        return d;
      },
      py::arg("problem"), py::arg("x"), py::arg("mu"), py::arg("omega"));

  m.def(
      "auglag",
      [](const Problem& p, const py::dict& settings) {
        AuglagConfig c;
        Vector x0 = p.start();
        cli::apply_overrides(c, settings_to_kv(settings), &x0);
        AuglagResult r;
        {
          py::gil_scoped_release release;
          r = auglag_solve(p, c, x0);
        }
        return result_dict(r.x, r.mu, r.omega, r.status, r.trace, r.certificate);
      },
      py::arg("problem"), py::arg("settings") = py::dict());

  m.def(
      "sqp",
      [](const Problem& p, const py::dict& settings) {
        SqpConfig c;
        Vector x0 = p.start(), mu0, omega0;
        cli::apply_overrides(c, settings_to_kv(settings), &x0, &mu0, &omega0);
        if (!omega0.empty()) cli::validate_omega(p.cone(), omega0);
        SqpResult r;
        {
          py::gil_scoped_release release;
          r = sqp_solve(p, c, x0, mu0, omega0);
        }
        return result_dict(r.x, r.mu, r.omega, r.status, r.trace, r.certificate);
      },
      py::arg("problem"), py::arg("settings") = py::dict());

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"socp"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
