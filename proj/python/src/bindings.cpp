#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stnoma/experiments.hpp"

namespace py = pybind11;
using namespace stnoma;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simultaneous-triangularization MIMO-NOMA precoding";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonGenericChannel>(m, "NonGenericChannel", PyExc_RuntimeError);

  py::class_<Antennas>(m, "Antennas")
      .def(py::init([](int n_bs, int m1, int m2) { return Antennas{n_bs, m1, m2}; }),
           py::arg("n_bs"), py::arg("m1"), py::arg("m2"))
      .def_readwrite("n_bs", &Antennas::n_bs)
      .def_readwrite("m1", &Antennas::m1)
      .def_readwrite("m2", &Antennas::m2)
      .def("__repr__", [](const Antennas& a) { return "Antennas(" + antenna_label(a) + ")"; });

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("antennas", &SystemConfig::antennas)
      .def_readwrite("pathloss1", &SystemConfig::pathloss1)
      .def_readwrite("pathloss2", &SystemConfig::pathloss2)
      .def_readwrite("power_budget", &SystemConfig::power_budget)
      .def_readwrite("noise_power", &SystemConfig::noise_power)
      .def_readwrite("seed", &SystemConfig::seed)
      .def("validate", [](const SystemConfig& c) { validate(c); });

  py::class_<StreamDims>(m, "StreamDims")
      .def_readonly("total", &StreamDims::total)
      .def_readonly("private1", &StreamDims::private1)
      .def_readonly("private2", &StreamDims::private2)
      .def_readonly("shared", &StreamDims::shared);

  m.def("derive_dims", py::overload_cast<int, int, int>(&derive_dims), py::arg("n_bs"),
        py::arg("m1"), py::arg("m2"));
  m.def("config_from_scenario", &config_from_scenario, py::arg("antennas"), py::arg("d1"),
        py::arg("d2"), py::arg("exponent"), py::arg("pt_dbm"), py::arg("sigma2_dbm"));

  m.def(
      "sample_channels",
      [](int n_bs, int m1, int m2, std::uint64_t seed, std::uint64_t index) {
        Rng rng = trial_rng(seed, index);
        auto ch = sample_channels(rng, n_bs, m1, m2);
        return py::make_tuple(ch.h1, ch.h2);
      },
      py::arg("n_bs"), py::arg("m1"), py::arg("m2"), py::arg("seed"), py::arg("index") = 0,
      "(H1, H2) for Monte Carlo trial `index` under `seed`.");

  py::class_<StDecomposition>(m, "StDecomposition")
      .def_readonly("x", &StDecomposition::x)
      .def_readonly("q1", &StDecomposition::q1)
      .def_readonly("q2", &StDecomposition::q2)
      .def_readonly("r1", &StDecomposition::r1)
      .def_readonly("r2", &StDecomposition::r2)
      .def_readonly("dims", &StDecomposition::dims);

  m.def(
      "triangularize",
      [](const CMatrix& h1, const CMatrix& h2) {
        const auto dims = derive_dims(static_cast<int>(h1.cols()), static_cast<int>(h1.rows()),
                                      static_cast<int>(h2.rows()));
        return simultaneous_triangularize(ChannelPair{h1, h2}, dims);
      },
      py::arg("h1"), py::arg("h2"));
  m.def(
      "decomposition_residual",
      [](const StDecomposition& d, const CMatrix& h1, const CMatrix& h2) {
        return verify_decomposition(d, ChannelPair{h1, h2}).worst();
      },
      py::arg("decomposition"), py::arg("h1"), py::arg("h2"));

  py::class_<PowerAllocation>(m, "PowerAllocation")
      .def(py::init([](std::vector<double> p1, std::vector<double> p2) {
             return PowerAllocation{std::move(p1), std::move(p2)};
           }),
           py::arg("p1"), py::arg("p2"))
      .def_readwrite("p1", &PowerAllocation::p1)
      .def_readwrite("p2", &PowerAllocation::p2)
      .def("total", &PowerAllocation::total);

  py::class_<RateBreakdown>(m, "RateBreakdown")
      .def_readonly("r1", &RateBreakdown::r1)
      .def_readonly("r2", &RateBreakdown::r2)
      .def_readonly("total1", &RateBreakdown::total1)
      .def_readonly("total2", &RateBreakdown::total2);
  m.def("rate_breakdown", &rate_breakdown, py::arg("power"), py::arg("decomposition"),
        py::arg("config"));
  m.def("weighted_sum_rate", &weighted_sum_rate, py::arg("power"), py::arg("decomposition"),
        py::arg("config"), py::arg("mu"));

  py::enum_<Linearization>(m, "Linearization")
      .value("OWN_COORDINATE", Linearization::kOwnCoordinate)
      .value("FULL_GRADIENT", Linearization::kFullGradient);

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("ccp_max_iters", &SolverSettings::ccp_max_iters)
      .def_readwrite("ccp_tol", &SolverSettings::ccp_tol)
      .def_readwrite("inner_tol", &SolverSettings::inner_tol)
      .def_readwrite("inner_max_iters", &SolverSettings::inner_max_iters)
      .def_readwrite("linearization", &SolverSettings::linearization);

  m.def(
      "ccp_allocate",
      [](const StDecomposition& d, const SystemConfig& cfg, double mu,
         const SolverSettings& settings) {
        auto res = ccp_allocate(d, cfg, mu, settings);
        return py::make_tuple(res.power, res.state.objective_trace, res.state.converged);
      },
      py::arg("decomposition"), py::arg("config"), py::arg("mu"),
      py::arg("settings") = SolverSettings{},
      "(power, weighted sum rate per iteration, converged).");

  m.def("water_filling", [](std::vector<double> g, double budget) {
    return water_filling(g, budget);
  }, py::arg("gains"), py::arg("budget"));
  m.def("p2p_capacity", &p2p_capacity, py::arg("h"), py::arg("pathloss"), py::arg("budget"),
        py::arg("noise"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("antennas", &Scenario::antennas)
      .def_readwrite("trials", &Scenario::trials)
      .def_readwrite("mu_steps", &Scenario::mu_steps)
      .def_readwrite("tau_steps", &Scenario::tau_steps)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("solver", &Scenario::solver)
      .def("set", [](Scenario& s, std::string_view k, std::string_view v) {
        set_scenario_key(s, k, v);
      }, py::arg("key"), py::arg("value"))
      .def("system_config", &Scenario::system_config);
  m.def("parse_scenario", [](std::string_view text) { return parse_scenario(text); },
        py::arg("text"));

  m.def(
      "run_region",
      [](const Scenario& s, const std::filesystem::path& out, int workers) {
        py::gil_scoped_release release;
        return run_region(s, out, workers).csv;
      },
      py::arg("scenario"), py::arg("out_dir"), py::arg("workers") = 1,
      "Writes region.csv and region.svg; returns the CSV path.");
}
