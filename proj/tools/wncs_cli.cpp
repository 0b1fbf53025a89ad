// Command-line front end: `wncs run` and `wncs sweep`.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wncs/commands.hpp"
#include "wncs/scenario_io.hpp"

namespace {

void add_common(CLI::App* cmd, wncs::CommandOptions& opts, std::string& config, std::string& preset,
                std::string& out, long& trials, long& horizon, std::uint64_t& seed) {
  auto* cfg = cmd->add_option("--config", config, "Scenario JSON file")->check(CLI::ExistingFile);
  auto* pre = cmd->add_option("--preset", preset, "Built-in scenario name");
  cfg->excludes(pre);
  cmd->add_option("--schemes", opts.schemes, "Trigger schemes: sod, coil, voi, coilbar")
      ->delimiter(',');
  cmd->add_option("--thresholds", opts.thresholds, "Comma-separated thresholds")->delimiter(',');
  cmd->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", horizon, "Slots per trial")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", seed, "Base seed");
  cmd->add_option("--out", out, "Output directory")->capture_default_str();
  cmd->add_flag("--per-slot", opts.per_slot, "Also write per_slot.csv");
  cmd->add_option("--per-slot-cap", opts.per_slot_cap, "Row cap for per_slot.csv")
      ->capture_default_str();
  cmd->add_option("--workers", opts.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for wireless networked control with priority contention"};
  app.set_version_flag("--version", std::string(wncs::kVersion));
  app.require_subcommand(1);

  wncs::CommandOptions opts;
  std::string config, preset, out = opts.out.string();
  long trials = 0, horizon = 0;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run the configured scheme(s) and thresholds");
  auto* sweep = app.add_subcommand("sweep", "Sweep thresholds per scheme");
  add_common(run, opts, config, preset, out, trials, horizon, seed);
  add_common(sweep, opts, config, preset, out, trials, horizon, seed);
  app.add_subcommand("presets", "List built-in scenarios")->callback([] {
    for (const auto& name : wncs::preset_names()) std::cout << name << '\n';
  });

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = nullptr;
  for (auto* cmd : {run, sweep}) {
    if (cmd->parsed()) active = cmd;
  }
  if (active == nullptr) return 0;

  if (!config.empty()) opts.config = config;
  if (!preset.empty()) opts.preset = preset;
  if (active->count("--trials") > 0) opts.trials = trials;
  if (active->count("--horizon") > 0) opts.horizon = horizon;
  if (active->count("--seed") > 0) opts.seed = seed;
  opts.out = out;

  return active == run ? wncs::run_command(opts, std::cerr) : wncs::sweep_command(opts, std::cerr);
}
