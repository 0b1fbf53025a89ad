#include "wncs/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wncs/errors.hpp"
#include "wncs/scenario_io.hpp"

namespace wncs {

using nlohmann::json;

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Scenario load_scenario(const CommandOptions& options) {
  if (options.config && options.preset) {
    throw ConfigError("--config and --preset are mutually exclusive");
  }
  Scenario s;
  if (options.config) {
    s = parse_scenario_file(*options.config);
  } else if (options.preset) {
    s = preset_scenario(*options.preset);
  } else {
    throw ConfigError("one of --config or --preset is required");
  }
  if (options.trials) s.trials = *options.trials;
  if (options.horizon) s.horizon = *options.horizon;
  if (options.seed) s.seed = *options.seed;
  if (auto issues = validate(s); !issues.empty()) throw ConfigError(std::move(issues));
  return s;
}

namespace {

struct Cell {
  std::string label;
  double threshold;
  Scenario scenario;
};

std::vector<Cell> grid_cells(const Scenario& scenario, const CommandOptions& options, bool sweep) {
  std::vector<Scheme> schemes;
  for (const auto& name : options.schemes) schemes.push_back(parse_scheme(name));
  if (schemes.empty() && sweep) {
    for (Scheme s : kAllSchemes) {
      if (scenario.sweep.contains(s)) schemes.push_back(s);
    }
    if (schemes.empty()) throw ConfigError("sweep: no schemes given and the scenario has no sweep table");
  }

  std::vector<Cell> cells;
  std::set<std::pair<std::string, double>> seen;
  auto add = [&](std::string label, double threshold, Scenario s) {
    if (!seen.insert({label, threshold}).second) return;
    cells.push_back({std::move(label), threshold, std::move(s)});
  };

  if (schemes.empty()) {
    // Run exactly as configured, optionally overriding the threshold.
    bool uniform = true;
    for (const auto& p : scenario.policies) uniform = uniform && p.scheme == scenario.policies[0].scheme;
    const std::string label =
        uniform ? std::string(scheme_name(scenario.policies[0].scheme)) : std::string("mixed");
    if (options.thresholds.empty()) {
      add(label, scenario.policies[0].threshold, scenario);
    } else {
      for (double t : options.thresholds) {
        Scenario s = scenario;
        for (auto& p : s.policies) p.threshold = t;
        add(label, t, std::move(s));
      }
    }
    return cells;
  }

  for (Scheme scheme : schemes) {
    std::vector<double> thresholds = options.thresholds;
    if (thresholds.empty() && sweep) {
      auto it = scenario.sweep.find(scheme);
      if (it == scenario.sweep.end()) {
        throw ConfigError("sweep." + std::string(scheme_name(scheme)) +
                          ": no thresholds given for this scheme");
      }
      thresholds = it->second;
    }
    if (thresholds.empty()) thresholds = {scenario.policies[0].threshold};
    for (double t : thresholds) {
      if (!(t >= 0.0)) throw ConfigError("--thresholds: threshold must be nonnegative");
      add(std::string(scheme_name(scheme)), t, with_policy(scenario, {scheme, t}));
    }
  }
  return cells;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string join_vector(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ';';
    s += format_real(v(i));
  }
  return s;
}

}  // namespace

ResultBundle execute_grid(const Scenario& scenario, const CommandOptions& options, bool sweep) {
  ResultBundle bundle;
  bundle.config_hash = config_hash(scenario);
  bundle.seed = scenario.seed;
  bundle.trials = scenario.trials;
  bundle.horizon = scenario.horizon;
  bundle.source = options.config ? options.config->string()
                                 : (options.preset ? "preset:" + *options.preset : "");
  for (auto& cell : grid_cells(scenario, options, sweep)) {
    const PreparedScenario prepared = prepare(cell.scenario);
    AggregateRow row;
    row.scheme = cell.label;
    row.threshold = cell.threshold;
    row.report = run_monte_carlo(prepared, options.workers);
    row.stability = stability_diagnostic(row.report, prepared.scenario.subsystems);
    bundle.rows.push_back(std::move(row));
  }
  return bundle;
}

std::string aggregate_csv(const ResultBundle& bundle) {
  std::ostringstream out;
  const std::size_t n = bundle.rows.empty() ? 0 : bundle.rows.front().report.subsystems.size();
  out << "scheme,threshold,trials,horizon,mean_cost,cost_stderr,mean_attempt_rate,"
         "attempt_rate_stderr,collision_violations";
  for (std::size_t i = 1; i <= n; ++i) {
    out << ",attempt_rate_" << i << ",win_share_" << i << ",gamma_rate_" << i << ",decay_rate_" << i
        << ",stability_bound_" << i << ",stability_margin_" << i;
  }
  out << '\n';
  for (const auto& row : bundle.rows) {
    const auto& r = row.report;
    out << row.scheme << ',' << format_real(row.threshold) << ',' << r.trials << ',' << r.horizon
        << ',' << format_real(r.mean_cost) << ',' << format_real(r.cost_stderr) << ','
        << format_real(r.mean_attempt_rate) << ',' << format_real(r.attempt_rate_stderr) << ','
        << r.collision_violations;
    for (std::size_t i = 0; i < r.subsystems.size(); ++i) {
      const auto& s = r.subsystems[i];
      const auto& st = row.stability.at(i);
      out << ',' << format_real(s.attempt_rate) << ',' << format_real(s.win_share) << ','
          << format_real(s.gamma_rate) << ','
          << (st.inconclusive ? std::string("nan") : format_real(st.decay_rate)) << ','
          << format_real(st.bound) << ','
          << (st.inconclusive ? std::string("nan") : format_real(st.margin));
    }
    out << '\n';
  }
  return out.str();
}

std::string aggregate_json(const ResultBundle& bundle) {
  json doc;
  doc["metadata"] = {{"config_hash", bundle.config_hash},
                     {"seed", bundle.seed},
                     {"trials", bundle.trials},
                     {"horizon", bundle.horizon},
                     {"source", bundle.source},
                     {"version", kVersion}};
  json rows = json::array();
  for (const auto& row : bundle.rows) {
    const auto& r = row.report;
    json subs = json::array();
    for (std::size_t i = 0; i < r.subsystems.size(); ++i) {
      const auto& s = r.subsystems[i];
      const auto& st = row.stability.at(i);
      json stability = {{"bound", st.bound}, {"inconclusive", st.inconclusive},
                        {"overflow_mass", st.overflow_mass}};
      if (!st.inconclusive) {
        stability["decay_rate"] = st.decay_rate;
        stability["margin"] = st.margin;
        stability["satisfied"] = st.satisfied;
        stability["fit_range"] = {st.fit_first_t, st.fit_last_t};
      }
      subs.push_back({{"index", i + 1},
                      {"attempt_rate", s.attempt_rate},
                      {"win_share", s.win_share},
                      {"gamma_rate", s.gamma_rate},
                      {"attempts", s.attempts},
                      {"wins", s.wins},
                      {"successes", s.successes},
                      {"stability", std::move(stability)}});
    }
    auto audit_json = [](const AuditStats& a) {
      return json{{"slots", a.slots}, {"agreements", a.agreements}, {"value_ties", a.value_ties},
                  {"quantization_ties", a.quantization_ties}};
    };
    rows.push_back({{"scheme", row.scheme},
                    {"threshold", row.threshold},
                    {"mean_cost", r.mean_cost},
                    {"cost_stderr", r.cost_stderr},
                    {"mean_attempt_rate", r.mean_attempt_rate},
                    {"attempt_rate_stderr", r.attempt_rate_stderr},
                    {"collision_violations", r.collision_violations},
                    {"quantization_mismatches", r.quantization_mismatches},
                    {"coil_audit", audit_json(r.coil_audit)},
                    {"voi_audit", audit_json(r.voi_audit)},
                    {"subsystems", std::move(subs)}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string plot_data_csv(const ResultBundle& bundle) {
  std::ostringstream out;
  out << "scheme,threshold,attempt_rate,cost,cost_stderr\n";
  for (const auto& row : bundle.rows) {
    out << row.scheme << ',' << format_real(row.threshold) << ','
        << format_real(row.report.mean_attempt_rate) << ',' << format_real(row.report.mean_cost)
        << ',' << format_real(row.report.cost_stderr) << '\n';
  }
  return out.str();
}

void write_bundle(const ResultBundle& bundle, const Scenario& scenario,
                  const CommandOptions& options) {
  (void)scenario;
  std::filesystem::create_directories(options.out);
  write_text(options.out / "aggregate.csv", aggregate_csv(bundle));
  write_text(options.out / "aggregate.json", aggregate_json(bundle));
  write_text(options.out / "plot_data.csv", plot_data_csv(bundle));
}

namespace {

void write_per_slot(const Scenario& scenario, const CommandOptions& options, bool sweep) {
  const auto cells = grid_cells(scenario, options, sweep);
  long rows = 0;
  for (const auto& cell : cells) {
    rows += cell.scenario.trials * cell.scenario.horizon *
            static_cast<long>(cell.scenario.subsystems.size());
  }
  if (rows > options.per_slot_cap) {
    throw ConfigError("--per-slot: " + std::to_string(rows) + " rows exceed the cap of " +
                      std::to_string(options.per_slot_cap) +
                      " (reduce --trials/--horizon or raise --per-slot-cap)");
  }
  std::filesystem::create_directories(options.out);
  std::ofstream out(options.out / "per_slot.csv", std::ios::binary);
  if (!out) throw std::runtime_error("per_slot.csv: cannot open for writing");
  out << "scheme,threshold,trial,k,subsystem,theta,delta,gamma,channel,priority,t,cost,x,x_hat\n";
  RunOptions run_options;
  run_options.record_slots = true;
  run_options.audit = false;
  for (const auto& cell : cells) {
    const PreparedScenario prepared = prepare(cell.scenario);
    for (long trial = 0; trial < cell.scenario.trials; ++trial) {
      const Telemetry tel = run_trial(prepared, trial, run_options);
      for (const auto& slot : tel.slots) {
        for (std::size_t i = 0; i < slot.subsystems.size(); ++i) {
          const auto& s = slot.subsystems[i];
          out << cell.label << ',' << format_real(cell.threshold) << ',' << trial << ',' << slot.k
              << ',' << i + 1 << ',' << s.theta << ',' << s.delta << ',' << s.gamma << ','
              << s.channel << ',' << format_real(s.priority) << ',' << s.t << ','
              << format_real(s.cost) << ',' << join_vector(s.x) << ',' << join_vector(s.x_hat)
              << '\n';
        }
      }
    }
  }
  if (!out) throw std::runtime_error("per_slot.csv: write failed");
}

int execute(const CommandOptions& options, std::ostream& log, bool sweep) {
  try {
    const Scenario scenario = load_scenario(options);
    if (options.per_slot) {
      // Fail on the size guard before the (possibly long) aggregate run.
      write_per_slot(scenario, options, sweep);
    }
    const ResultBundle bundle = execute_grid(scenario, options, sweep);
    write_bundle(bundle, scenario, options);
    for (const auto& row : bundle.rows) {
      log << row.scheme << " threshold=" << format_real(row.threshold)
          << " cost=" << format_real(row.report.mean_cost) << " +/- "
          << format_real(row.report.cost_stderr)
          << " attempt_rate=" << format_real(row.report.mean_attempt_rate) << '\n';
    }
    log << "wrote " << bundle.rows.size() << " rows to " << options.out.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    log << "configuration error:\n";
    for (const auto& issue : e.issues()) log << "  " << issue << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int run_command(const CommandOptions& options, std::ostream& log) {
  return execute(options, log, false);
}

int sweep_command(const CommandOptions& options, std::ostream& log) {
  return execute(options, log, true);
}

}  // namespace wncs
