#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tvaoi/config.hpp"
#include "tvaoi/error.hpp"
#include "tvaoi/metrics.hpp"
#include "tvaoi/montecarlo.hpp"
#include "tvaoi/pss.hpp"

namespace py = pybind11;
using namespace tvaoi;

namespace {

py::object optional_list(const std::vector<std::optional<double>>& v) {
  py::list out;
  for (const auto& x : v) out.append(x ? py::cast(*x) : py::none());
  return std::move(out);
}

py::dict metrics_dict(const ClassMetrics& m) {
  py::dict d;
  d["class"] = m.class_index;
  d["t"] = m.times;
  d["mean_aoi"] = m.mean_aoi;
  d["peak_aoi"] = optional_list(m.peak_aoi);
  d["service_prob"] = m.service_prob;
  d["unserved_age"] = optional_list(m.unserved_age);
  d["gap_lhs"] = optional_list(m.gap_lhs);
  d["gap_rhs"] = optional_list(m.gap_rhs);
  return d;
}

template <class F>
auto without_gil(F&& f) {
  py::gil_scoped_release release;
  return f();
}

MomentDynamics dynamics_of(const ScenarioConfig& cfg) {
  return {StateSpace(cfg.scenario.n_classes()), cfg.scenario};
}

py::dict solve(const ScenarioConfig& cfg) {
  const auto dyn = dynamics_of(cfg);
  const auto sol = without_gil([&] { return solve_pss(dyn, cfg.solver); });
  py::dict d;
  d["converged"] = sol.converged;
  d["iterations"] = sol.iterations;
  d["residuals"] = sol.residual_history;
  d["periodicity_residual"] = sol.periodicity_residual;
  d["x0"] = sol.x_star_0.data();
  py::list metrics;
  for (const auto& m : all_class_metrics(dyn.space(), dyn.scenario(), sol.trajectory)) {
    metrics.append(metrics_dict(m));
  }
  d["metrics"] = metrics;
  return d;
}

py::dict floquet(const ScenarioConfig& cfg) {
  const auto dyn = dynamics_of(cfg);
  const auto rep = without_gil([&] { return monodromy(dyn, cfg.solver.integration); });
  py::dict d;
  d["multipliers"] = rep.multipliers;
  d["spectral_radius"] = rep.spectral_radius;
  d["stable"] = rep.stable;
  d["lower_block_residual"] = rep.lower_block_residual;
  return d;
}

py::dict estimate_dict(const McEstimate& est) {
  py::dict d;
  d["grid"] = est.grid;
  d["n_paths"] = est.n_paths;
  py::list mean, mean_se, peak, peak_se;
  for (std::size_t k = 0; k < est.mean_aoi.size(); ++k) {
    std::vector<double> m, ms, p, ps;
    for (std::size_t j = 0; j < est.grid.size(); ++j) {
      m.push_back(est.mean_aoi[k][j].value);
      ms.push_back(est.mean_aoi[k][j].se);
      p.push_back(est.peak_aoi[k][j].value);
      ps.push_back(est.peak_aoi[k][j].se);
    }
    mean.append(m);
    mean_se.append(ms);
    peak.append(p);
    peak_se.append(ps);
  }
  d["mean_aoi"] = mean;
  d["mean_aoi_se"] = mean_se;
  d["peak_aoi"] = peak;
  d["peak_aoi_se"] = peak_se;
  return d;
}

py::dict simulate(const ScenarioConfig& cfg, std::optional<int> n_paths, std::optional<std::uint64_t> seed) {
  McConfig mc = cfg.mc;
  if (seed) mc.root_seed = *seed;
  const auto grid = sampling_grid(cfg.scenario, cfg.solver.integration, cfg.grid_bins);
  return estimate_dict(without_gil([&] {
    const auto paths = simulate_paths(cfg.scenario, mc, grid, n_paths.value_or(mc.n_paths));
    return estimate(paths, cfg.scenario.period(), grid);
  }));
}

py::list validate_progressive(const ScenarioConfig& cfg, std::optional<std::vector<int>> counts) {
  const auto dyn = dynamics_of(cfg);
  const auto rows = without_gil([&] {
    const auto sol = solve_pss(dyn, cfg.solver);
    const auto grid = sampling_grid(cfg.scenario, cfg.solver.integration, cfg.grid_bins);
    return progressive_mae(dyn, sol, cfg.mc, grid, counts.value_or(cfg.path_counts));
  });
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["n_paths"] = r.n_paths;
    d["mean_aoi_mae"] = r.mean_mae;
    d["peak_aoi_mae"] = r.peak_mae;
    d["mean_level"] = r.mean_level;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Periodic steady-state AoI solver and Monte Carlo validator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init<int>(), py::arg("n_classes"))
      .def_property_readonly("n_classes", &StateSpace::n_classes)
      .def("__len__", &StateSpace::size)
      .def("index_of", [](const StateSpace& s, int in_service, std::uint32_t buffers) {
        return s.index_of(SystemState(in_service, buffers));
      }, py::arg("in_service"), py::arg("buffers"))
      .def("states", [](const StateSpace& s) {
        std::vector<std::pair<int, std::uint32_t>> out;
        for (const auto& st : s.states()) out.emplace_back(st.in_service(), st.buffers());
        return out;
      });

  py::class_<ScenarioConfig>(m, "Config")
      .def_property_readonly("n_classes", [](const ScenarioConfig& c) { return c.scenario.n_classes(); })
      .def_property_readonly("period", [](const ScenarioConfig& c) { return c.scenario.period(); })
      .def_property("steps_per_period",
                    [](const ScenarioConfig& c) { return c.solver.integration.steps_per_period; },
                    [](ScenarioConfig& c, int steps) {
                      c.solver.integration.steps_per_period = steps;
                      validate(c.solver);
                    })
      .def("rates", [](const ScenarioConfig& c, double t) {
        const auto r = sample_rates(c.scenario, t);
        return py::make_tuple(r.lambda, r.mu);
      }, py::arg("t"))
      .def("__repr__", [](const ScenarioConfig& c) { return c.canonical; });

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
  m.def("solve", &solve, py::arg("config"));
  m.def("floquet", &floquet, py::arg("config"));
  m.def("simulate", &simulate, py::arg("config"), py::arg("n_paths") = py::none(),
        py::arg("seed") = py::none());
  m.def("validate", &validate_progressive, py::arg("config"), py::arg("path_counts") = py::none());
}
