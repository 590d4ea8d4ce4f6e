#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "kslab/commands.hpp"
#include "kslab/errors.hpp"

namespace py = pybind11;
using namespace kslab;

namespace {

py::dict records_dict(const std::vector<TrajectoryRecord>& recs) {
  std::vector<double> t, linf, mass, mu, umin, origin;
  for (const auto& r : recs) {
    t.push_back(r.t);
    linf.push_back(r.linf_u);
    mass.push_back(r.mass_u);
    mu.push_back(r.mu);
    umin.push_back(r.min_u);
    origin.push_back(r.u_origin);
  }
  py::dict d;
  d["t"] = t;
  d["linf_u"] = linf;
  d["mass_u"] = mass;
  d["mu"] = mu;
  d["min_u"] = umin;
  d["u_origin"] = origin;
  return d;
}

void verdict_into(py::dict& d, const Verdict& v) {
  d["verdict"] = verdict_name(v);
  if (const auto* g = std::get_if<Growing>(&v)) d["alpha_hat"] = g->alpha_hat;
  else d["alpha_hat"] = py::none();
}

py::dict params_dict(const SubsolutionParams& sp) {
  py::dict d;
  for (const auto& [k, v] : subsolution_params_table(sp)) d[py::str(k)] = std::stod(v);
  return d;
}

}  // namespace

PYBIND11_MODULE(_kslab, m) {
  m.doc() = "Radial chemotaxis solvers, subsolution certificates and constants";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<OutOfTheory>(m, "OutOfTheory", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConstructionFailed>(m, "ConstructionFailed", PyExc_RuntimeError);
  py::register_exception<StepFailure>(m, "StepFailure", PyExc_RuntimeError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](int n, double mm, double M) {
             ModelParams p{n, mm, M};
             p.validate();
             return p;
           }),
           py::arg("n"), py::arg("m"), py::arg("M"))
      .def_readonly("n", &ModelParams::n)
      .def_readonly("m", &ModelParams::m)
      .def_readonly("M", &ModelParams::M)
      .def("critical_exponent", &ModelParams::critical_exponent)
      .def("is_critical", &ModelParams::is_critical, py::arg("tol") = 1e-12);

  m.def("omega_n", &omega_n, py::arg("n"));
  m.def("unit_ball_volume", &unit_ball_volume, py::arg("n"));
  m.def("blowup_mass_threshold", &blowup_mass_threshold, py::arg("n"));
  m.def("theta", &theta, py::arg("p"), py::arg("m"), py::arg("n"));
  m.def(
      "critical_mass",
      [](double p, double mm, int n, double c1) {
        const auto r = critical_mass(p, mm, n, c1);
        return py::make_tuple(r.value, r.theta, r.warning);
      },
      py::arg("p"), py::arg("m"), py::arg("n"), py::arg("c1"),
      "(value, theta, warning) of the critical mass");

  m.def(
      "constants",
      [](const std::vector<std::string>& settings) {
        py::dict d;
        for (const auto& [k, v] : constants_table(config_from_settings(settings))) d[py::str(k)] = v;
        return d;
      },
      py::arg("settings"), "Labeled constants as strings, from key=value settings");

  m.def(
      "select_parameters",
      [](const ModelParams& p, double eta) { return params_dict(select_parameters(p, eta)); },
      py::arg("params"), py::arg("eta") = 1.0);

  m.def(
      "certify",
      [](const std::vector<std::string>& settings) {
        const auto c = certify_pipeline(config_from_settings(settings));
        py::dict d = params_dict(c.cert.params);
        d["pass"] = c.cert.pass;
        d["max_inner_residual"] = c.cert.max_inner_residual;
        d["max_outer_residual"] = c.cert.max_outer_residual;
        d["alpha_halvings"] = c.cert.alpha_halvings;
        return d;
      },
      py::arg("settings"));

  m.def(
      "simulate",
      [](const std::vector<std::string>& settings) {
        const auto cfg = config_from_settings(settings);
        SimulateOutcome s;
        {
          py::gil_scoped_release release;
          s = simulate(cfg);
        }
        py::dict d = records_dict(s.result.records);
        verdict_into(d, s.result.verdict);
        d["mass_drift"] = s.mass_drift;
        d["r"] = s.result.final_state.u.radii;
        d["u"] = s.result.final_state.u.values;
        d["w"] = s.result.final_state.w.values;
        return d;
      },
      py::arg("settings"), "Primitive-variable run from key=value settings");

  m.def(
      "simulate_mass",
      [](const std::vector<std::string>& settings) {
        const auto cfg = config_from_settings(settings);
        MassSimulateOutcome s;
        {
          py::gil_scoped_release release;
          s = simulate_mass(cfg);
        }
        py::dict d = records_dict(s.result.records);
        verdict_into(d, s.result.verdict);
        d["xi"] = s.result.final_state.U.xis;
        d["U"] = s.result.final_state.U.values;
        return d;
      },
      py::arg("settings"), "Mass-variable run from key=value settings");

  m.def(
      "sweep",
      [](const std::vector<std::string>& settings, int threads) {
        const auto cfg = config_from_settings(settings);
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep(cfg, threads);
        }
        py::list out;
        for (const auto& r : rows) out.append(py::make_tuple(r.m, r.M, r.verdict, r.alpha_hat));
        return out;
      },
      py::arg("settings"), py::arg("threads") = 1);

  m.def(
      "run_command",
      [](const std::string& mode, std::optional<std::filesystem::path> config,
         const std::vector<std::string>& overrides, std::optional<std::filesystem::path> out) {
        std::ostringstream os, es;
        const int rc = run_command(mode, config, overrides, out, os, es);
        return py::make_tuple(rc, os.str(), es.str());
      },
      py::arg("mode"), py::arg("config") = py::none(),
      py::arg("overrides") = std::vector<std::string>{}, py::arg("out") = py::none(),
      "(exit_code, stdout, stderr) of a CLI mode");
}
