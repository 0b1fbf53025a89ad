#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wncs/commands.hpp"
#include "wncs/engine.hpp"
#include "wncs/errors.hpp"
#include "wncs/numerics.hpp"
#include "wncs/scenario_io.hpp"

namespace py = pybind11;
using namespace wncs;

namespace {

Scenario from_json(const std::string& text) { return parse_scenario_text(text); }

CommandOptions grid_options(const std::vector<std::string>& schemes,
                            const std::vector<double>& thresholds, std::optional<long> trials,
                            std::optional<long> horizon, std::optional<std::uint64_t> seed,
                            unsigned workers) {
  CommandOptions o;
  o.schemes = schemes;
  o.thresholds = thresholds;
  o.trials = trials;
  o.horizon = horizon;
  o.seed = seed;
  o.workers = workers;
  return o;
}

std::string run_grid(const std::string& scenario_json, bool sweep,
                     const std::vector<std::string>& schemes,
                     const std::vector<double>& thresholds, std::optional<long> trials,
                     std::optional<long> horizon, std::optional<std::uint64_t> seed,
                     unsigned workers) {
  Scenario s = from_json(scenario_json);
  if (trials) s.trials = *trials;
  if (horizon) s.horizon = *horizon;
  if (seed) s.seed = *seed;
  if (auto issues = validate(s); !issues.empty()) throw ConfigError(std::move(issues));
  const auto options = grid_options(schemes, thresholds, trials, horizon, seed, workers);
  ResultBundle bundle;
  {
    py::gil_scoped_release release;
    bundle = execute_grid(s, options, sweep);
  }
  bundle.source = "python";
  return aggregate_json(bundle);
}

py::dict slot_dict(const SubsystemSlot& s) {
  py::dict d;
  d["x"] = s.x;
  d["x_hat"] = s.x_hat;
  d["priority"] = s.priority;
  d["theta"] = s.theta;
  d["delta"] = s.delta;
  d["gamma"] = s.gamma;
  d["channel"] = s.channel;
  d["t"] = s.t;
  d["cost"] = s.cost;
  return d;
}

py::dict trial(const std::string& scenario_json, long trial_index, bool record_slots) {
  const PreparedScenario prepared = prepare(from_json(scenario_json));
  RunOptions options;
  options.record_slots = record_slots;
  Telemetry t;
  {
    py::gil_scoped_release release;
    t = run_trial(prepared, trial_index, options);
  }
  py::dict out;
  out["horizon"] = t.horizon;
  out["average_cost"] = t.average_cost();
  out["attempt_rate"] = t.attempt_rate();
  out["collision_violations"] = t.collision_violations;
  py::list subs;
  for (std::size_t i = 0; i < t.subsystems.size(); ++i) {
    const auto& s = t.subsystems[i];
    py::dict d;
    d["cost_sum"] = s.cost_sum;
    d["attempts"] = s.attempts;
    d["wins"] = s.wins;
    d["successes"] = s.successes;
    d["attempt_rate"] = t.attempt_rate(i);
    subs.append(d);
  }
  out["subsystems"] = subs;
  py::list slots;
  for (const auto& rec : t.slots) {
    py::list per;
    for (const auto& s : rec.subsystems) per.append(slot_dict(s));
    slots.append(per);
  }
  out["slots"] = slots;
  return out;
}

}  // namespace

PYBIND11_MODULE(_wncs, m) {
  m.doc() = "Event-triggered networked control simulation core";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("solve_dare",
        [](const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r) {
          return solve_dare(a, b, q, r);
        },
        py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("R"));
  m.def("dare_residual", &dare_residual, py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("R"),
        py::arg("Pi"));
  m.def("steady_state_covariance",
        [](const Matrix& a, const Matrix& c, const Matrix& w, const Matrix& v) {
          const auto f = steady_state_covariance(a, c, w, v);
          return py::make_tuple(f.p_bar, f.k_steady);
        },
        py::arg("A"), py::arg("C"), py::arg("W"), py::arg("V"),
        "Returns (P_bar, K) of the steady-state filter.");
  m.def("offline_gains",
        [](const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& q, const Matrix& r,
           const Matrix& w, const Matrix& v) {
          const auto g = compute_offline_gains(a, b, c, q, r, w, v);
          py::dict d;
          d["Pi"] = g.pi_inf;
          d["L"] = g.l_inf;
          d["Gamma"] = g.gamma_inf;
          d["P_bar"] = g.p_bar;
          d["K"] = g.k_steady;
          return d;
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("Q"), py::arg("R"), py::arg("W"),
        py::arg("V"));
  m.def("spectral_radius", &spectral_radius, py::arg("A"));

  m.def("preset_names", &preset_names);
  m.def("preset_json", [](const std::string& name) {
    return serialize_scenario(preset_scenario(name));
  }, py::arg("name"));
  m.def("canonical_json", [](const std::string& text) {
    return serialize_scenario(canonicalize(from_json(text)));
  }, py::arg("scenario_json"));
  m.def("config_hash", [](const std::string& text) { return config_hash(from_json(text)); },
        py::arg("scenario_json"));

  m.def("run_grid", &run_grid, py::arg("scenario_json"), py::arg("sweep") = false,
        py::arg("schemes") = std::vector<std::string>{},
        py::arg("thresholds") = std::vector<double>{}, py::arg("trials") = py::none(),
        py::arg("horizon") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = 1u,
        "Monte Carlo over a (scheme, threshold) grid; returns the aggregate JSON text.");
  m.def("run_trial", &trial, py::arg("scenario_json"), py::arg("trial_index") = 0,
        py::arg("record_slots") = false);
}
