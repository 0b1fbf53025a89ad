#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wncs {

// Model data violates a structural requirement (dimensions, PSD-ness,
// controllability/observability rank tests).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ill-conditioned or singular linear algebra.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fixed-point iteration hit its cap before converging.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (final residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Caller broke a documented precondition (e.g. gamma = 1 without a payload).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Scenario / identifier configuration problems. Carries every issue found,
// each prefixed with the path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  explicit ConfigError(const std::string& issue) : ConfigError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

// Failure inside a simulated trial; records where it happened.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, long trial, long slot)
      : std::runtime_error(describe(what, trial, slot)), trial_(trial), slot_(slot) {}

  long trial() const noexcept { return trial_; }
  long slot() const noexcept { return slot_; }

 private:
  static std::string describe(const std::string& what, long trial, long slot) {
    std::string s = "simulation failed";
    if (trial >= 0) s += " in trial " + std::to_string(trial);
    if (slot >= 0) s += " at slot " + std::to_string(slot);
    return s + ": " + what;
  }

  long trial_;
  long slot_;
};

}  // namespace wncs
