#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irssec/harness.hpp"
#include "irssec/metrics.hpp"

namespace py = pybind11;
using namespace irssec;

namespace {

py::dict record_dict(const RunRecord& r) {
  py::dict d;
  d["scenario_hash"] = r.scenario_hash;
  d["seed"] = r.seed;
  d["algorithm"] = r.algorithm;
  d["csi"] = r.csi;
  d["min_sr"] = r.min_sr;
  d["user_sr"] = r.user_sr;
  d["ssr"] = r.ssr;
  d["jain"] = r.jain;
  d["certified"] = r.certified;
  d["certified_users"] = r.certified_users;
  d["iterations"] = r.iterations;
  d["wall_seconds"] = r.wall_seconds;
  d["status"] = r.status;
  d["diagnostic"] = r.diagnostic;
  d["objective_series"] = r.objective_series;
  std::vector<double> theta(r.design.theta.data(), r.design.theta.data() + r.design.theta.size());
  d["theta"] = theta;
  std::vector<std::vector<cd>> W;
  for (const auto& w : r.design.W) W.emplace_back(w.data(), w.data() + w.size());
  d["W"] = W;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Secrecy-rate beamforming and IRS phase design";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("N", &Scenario::N)
      .def_readwrite("M", &Scenario::M)
      .def_readwrite("K", &Scenario::K)
      .def_readwrite("P", &Scenario::P)
      .def_readwrite("t_t", &Scenario::t_t)
      .def_readwrite("delta_k", &Scenario::delta_k)
      .def_readwrite("delta_e", &Scenario::delta_e)
      .def_readwrite("seed", &Scenario::seed)
      .def("set", [](Scenario& sc, const std::string& key, py::object value) {
        apply_setting(sc, key, py::str(value));
      })
      .def("validate", &Scenario::validate)
      .def("blocklength", &Scenario::blocklength)
      .def("noise_power", &Scenario::noise_power)
      .def("text", [](const Scenario& sc) { return format_scenario(sc); })
      .def("hash", [](const Scenario& sc) { return scenario_hash(sc); })
      .def("__repr__", [](const Scenario& sc) {
        return "Scenario(N=" + std::to_string(sc.N) + ", M=" + std::to_string(sc.M) + ", K=" + std::to_string(sc.K) + ")";
      });

  m.def("parse_scenario", &parse_scenario, py::arg("text"));
  m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));
  m.def("scenario_keys", &scenario_keys);

  m.def(
      "run",
      [](const Scenario& sc, const std::string& algorithm, bool robust, int seed_index, bool lbr_warm) {
        RunRecord r;
        {
          py::gil_scoped_release release;
          r = run_single(sc, parse_algo(algorithm), robust, seed_index, run_seed(sc, seed_index),
                         lbr_warm ? InitMode::LbrWarm : InitMode::Random, "none", 0);
        }
        return record_dict(r);
      },
      py::arg("scenario"), py::arg("algorithm") = "maxmin-fbr", py::arg("robust") = false, py::arg("seed_index") = 0,
      py::arg("lbr_warm") = false, "Runs one algorithm on one channel draw; rates in bps/Hz.");

  m.def(
      "validate",
      [](const Scenario& sc, const std::string& algorithm, int seed_index, int samples) {
        RunRecord r;
        ValidationResult v;
        {
          py::gil_scoped_release release;
          r = run_single(sc, parse_algo(algorithm), true, seed_index, run_seed(sc, seed_index), InitMode::Random,
                         "none", 0);
          v = validate_robustness(r, sc, samples);
        }
        py::dict d;
        d["pass"] = v.pass;
        d["worst_margin"] = v.worst_margin;
        d["message"] = v.message;
        d["record"] = record_dict(r);
        return d;
      },
      py::arg("scenario"), py::arg("algorithm") = "maxmin-lbr", py::arg("seed_index") = 0, py::arg("samples") = 1000,
      "Runs a robust design and checks its certificate against sampled channel errors.");

  m.def("q_inverse", &q_inverse, py::arg("tau"));
  m.def("penalty_xi", &penalty_xi, py::arg("tau"), py::arg("blocklength"));
  m.def("jain_index", &jain_index, py::arg("rates"));
  m.def("nats_to_bits", &nats_to_bits);
}
