#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/report.hpp"
#include "ssf/scattering_1d.hpp"
#include "ssf/scattering_radial3d.hpp"
#include "ssf/trace_lab.hpp"

namespace py = pybind11;

namespace {

// Reports cross the boundary as JSON text; the package turns them into dicts.
std::string identity_json(const ssf::IdentityReport& r) { return ssf::to_json(r).dump(); }

std::vector<double> ssf_values(const ssf::Potential& p, const std::vector<double>& lambdas) {
  if (p.dim() == 1) return ssf::ssf_1d(p, lambdas).xi;
  return ssf::ssf_3d(p, lambdas).xi;
}

std::vector<double> eigenvalues(const ssf::Potential& p) {
  return p.dim() == 1 ? ssf::bound_states_1d(p) : ssf::eigenvalues_3d(p);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral shift function laboratory (compiled core)";

  // Leaked on purpose: the type must outlive interpreter teardown of the module.
  static py::handle error_type = py::exception<ssf::Error>(m, "SsfLabError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ssf::Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(error_type);
      py::object instance = type(std::string(ssf::to_string(e.kind())) + ": " + e.what());
      instance.attr("kind") = ssf::to_string(e.kind());
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  py::class_<ssf::Potential>(m, "Potential")
      .def_static("zero", &ssf::Potential::zero, py::arg("dim") = 1)
      .def_static("poschl_teller", &ssf::Potential::poschl_teller, py::arg("n") = 1, py::arg("dim") = 1)
      .def_static("gaussian_well", &ssf::Potential::gaussian_well, py::arg("depth"), py::arg("width"), py::arg("dim") = 1)
      .def_static("square_well", &ssf::Potential::square_well, py::arg("depth"), py::arg("radius"), py::arg("dim") = 1)
      .def_static("exponential_well", &ssf::Potential::exponential_well, py::arg("depth"), py::arg("rate"),
                  py::arg("dim") = 1)
      .def_static("from_expression", &ssf::Potential::from_expression, py::arg("expression"), py::arg("dim"),
                  py::arg("rho"), py::arg("support_radius"), py::arg("params") = std::map<std::string, double>{})
      .def_property_readonly("dim", &ssf::Potential::dim)
      .def("__call__", [](const ssf::Potential& p, double x) { return p(x); })
      .def("__repr__", [](const ssf::Potential& p) { return "<Potential " + p.describe() + ">"; });

  m.def("heat_invariant", [](int n, int dim) { return ssf::heat_invariant_closed(n, dim).to_string(); },
        py::arg("n"), py::arg("dim"), "Canonical text of the local heat invariant g_n.");
  m.def("taylor_operator", [](int n, int dim) { return ssf::xn(n, dim).to_string(); }, py::arg("n"), py::arg("dim"));
  m.def("invariant_tables", &ssf::invariant_tables_text, py::arg("dim"), py::arg("max_n"));
  m.def("heat_coefficient", [](const ssf::Potential& p, int n) { return ssf::heat_coefficient(p, n).value; });
  m.def("ssf_coefficient", [](const ssf::Potential& p, int n) { return ssf::ssf_coefficient(p, n).value; });
  m.def("pd_coefficient", [](const ssf::Potential& p, int n) { return ssf::pd_coefficient(p, n).value; });

  m.def("jost", [](const ssf::Potential& p, double k) {
    ssf::JostData d = ssf::jost_solve(p, k);
    return py::make_tuple(d.a, d.b);
  }, py::arg("potential"), py::arg("k"), "Jost data (a, b) at momentum k (d = 1).");
  m.def("bound_states", &eigenvalues, py::arg("potential"));
  m.def("ssf", &ssf_values, py::arg("potential"), py::arg("lambdas"));
  m.def("phase_shift", [](const ssf::Potential& p, int ell, double k) { return ssf::phase_shift(p, ell, k); },
        py::arg("potential"), py::arg("ell"), py::arg("k"));

  m.def("heat_trace", [](const ssf::Potential& p, double t) {
    ssf::HeatTrace h = ssf::heat_trace_diff(ssf::SsfModel(p), t);
    py::dict out;
    out["ssf"] = h.via_ssf.value;
    out["oracle"] = h.via_oracle.value;
    out["series"] = h.via_series.value;
    return out;
  }, py::arg("potential"), py::arg("t"));
  m.def("resolvent_trace", [](const ssf::Potential& p, std::complex<double> z, int m_power, int terms) {
    ssf::ResolventTrace r = ssf::resolvent_trace_diff(ssf::SsfModel(p), z, m_power, terms);
    py::dict out;
    out["ssf"] = r.via_ssf.value;
    out["oracle"] = r.via_oracle.value;
    out["series"] = r.via_series.value;
    return out;
  }, py::arg("potential"), py::arg("z"), py::arg("m") = 1, py::arg("terms") = 2);

  m.def("_identity_integer", [](const ssf::Potential& p, int n, double tol) {
    return identity_json(ssf::trace_identity_integer(ssf::SsfModel(p), n, ssf::IdentityOptions{tol}));
  });
  m.def("_identity_half", [](const ssf::Potential& p, int n, double tol) {
    return identity_json(ssf::trace_identity_half(ssf::SsfModel(p), n, ssf::IdentityOptions{tol}));
  });
  m.def("_levinson", [](const ssf::Potential& p) { return identity_json(ssf::levinson_check(ssf::SsfModel(p))); });

  m.def("_run", [](const std::string& text, bool write_files) {
    ssf::RunResult r = ssf::run(ssf::parse_run_config(text), write_files);
    ssf::OrderedJson out;
    out["exit_status"] = r.exit_status;
    out["directory"] = r.directory.string();
    out["tasks"] = ssf::OrderedJson::array();
    for (const auto& t : r.tasks) out["tasks"].push_back(t.report);
    return out.dump();
  }, py::arg("config_text"), py::arg("write_files") = false);
}
