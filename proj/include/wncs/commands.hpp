#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wncs/engine.hpp"

namespace wncs {

inline constexpr const char* kVersion = "0.1.0";

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> preset;
  std::vector<std::string> schemes;
  std::vector<double> thresholds;
  std::optional<long> trials;
  std::optional<long> horizon;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "results";
  bool per_slot = false;
  long per_slot_cap = 1'000'000;  // rows
  unsigned workers = 1;
};

// One (scheme, threshold) cell of a run or sweep.
struct AggregateRow {
  std::string scheme;
  double threshold = 0.0;
  MonteCarloReport report;
  std::vector<StabilityReport> stability;
};

struct ResultBundle {
  std::string config_hash;
  std::uint64_t seed = 0;
  long trials = 0;
  long horizon = 0;
  std::string source;
  std::vector<AggregateRow> rows;
};

// Shortest locale-independent text with 17 significant digits.
std::string format_real(double value);

// Loads the scenario named by --config / --preset with overrides applied.
Scenario load_scenario(const CommandOptions& options);

// Executes Monte Carlo for each (scheme, threshold) cell. `sweep` selects the
// per-scheme threshold lists from the scenario when --thresholds is absent.
ResultBundle execute_grid(const Scenario& scenario, const CommandOptions& options, bool sweep);

std::string aggregate_csv(const ResultBundle& bundle);
std::string aggregate_json(const ResultBundle& bundle);
std::string plot_data_csv(const ResultBundle& bundle);

// Writes the bundle (and optionally per-slot telemetry) under options.out.
void write_bundle(const ResultBundle& bundle, const Scenario& scenario,
                  const CommandOptions& options);

// Full subcommands; return the process exit status.
int run_command(const CommandOptions& options, std::ostream& log);
int sweep_command(const CommandOptions& options, std::ostream& log);

}  // namespace wncs
