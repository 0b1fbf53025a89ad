#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wncs/estimation.hpp"
#include "wncs/network.hpp"
#include "wncs/policy.hpp"

namespace wncs {

struct Scenario {
  std::vector<SubsystemModel> subsystems;
  std::vector<PolicyConfig> policies;   // one per subsystem
  std::vector<Identifier> static_ids;   // empty: default table
  IdentifierLayout layout;
  std::size_t channels = 1;
  long horizon = 1000;
  long trials = 1;
  std::uint64_t seed = 1;
  std::map<Scheme, std::vector<double>> sweep;  // thresholds per scheme, optional
};

std::vector<std::string> validate(const Scenario& scenario);

// Copy of `scenario` with every subsystem running `policy`.
Scenario with_policy(Scenario scenario, const PolicyConfig& policy);

// Validated scenario plus offline gains and the resolved static identifiers.
struct PreparedScenario {
  Scenario scenario;
  std::vector<OfflineGains> gains;
  std::vector<Identifier> static_ids;
};

// Throws ConfigError with all validation issues, or ModelError from the
// offline solvers.
PreparedScenario prepare(const Scenario& scenario);

// Per-trial seeds for the three noise substreams. Each is further split per
// subsystem, so schemes compared on one trial index share plant and
// measurement noise exactly.
struct TrialSeeds {
  std::uint64_t plant;
  std::uint64_t measurement;
  std::uint64_t channel;

  static TrialSeeds for_trial(std::uint64_t base_seed, long trial_index);
};

struct RunOptions {
  bool record_slots = false;
  bool audit = true;
  long diagnostic_t_max = 4;  // error second moments are binned for t <= this
};

inline constexpr long kHistogramCap = 200;  // t values above land in the overflow bin

struct SubsystemSlot {
  Vector x;
  Vector x_hat;
  double priority = 0.0;
  bool theta = false;
  bool delta = false;
  bool gamma = false;
  int channel = -1;
  long t = 0;
  double cost = 0.0;
};

struct SlotRecord {
  long k = 0;
  std::vector<SubsystemSlot> subsystems;
};

struct SubsystemTelemetry {
  double cost_sum = 0.0;
  long attempts = 0;   // theta = 1
  long wins = 0;       // delta = 1
  long successes = 0;  // gamma = 1
  std::vector<long> t_histogram = std::vector<long>(kHistogramCap + 1, 0);
  long t_overflow = 0;
  long max_t = 0;

  // Error statistics of the remote posterior x - x_hat(k|k).
  Vector error_sum;
  Matrix error_outer_sum;
  std::vector<Matrix> error_outer_by_t;
  std::vector<long> count_by_t;
  // Smart sensors only: local filter error x - x_hat_s(k|k).
  Matrix sensor_error_outer_sum;
  long replica_mismatches = 0;
};

// Audit of the contention rule against the expected-cost oracle, over slots
// with at least two contenders of the same scheme.
struct AuditStats {
  long slots = 0;
  long agreements = 0;
  long value_ties = 0;          // top two priorities within 1e-12
  long quantization_ties = 0;   // top two dynamic identifiers equal
  long audited() const { return slots - value_ties - quantization_ties; }
  void merge(const AuditStats& other);
};

struct Telemetry {
  long horizon = 0;
  double total_cost = 0.0;
  std::vector<SubsystemTelemetry> subsystems;
  std::vector<SlotRecord> slots;  // only with RunOptions::record_slots
  long busy_slots = 0;
  long collision_violations = 0;       // slots/channels breaking the one-winner constraint
  long quantization_mismatches = 0;    // TOD winner differs from the exact argmax
  AuditStats coil_audit;
  AuditStats voi_audit;

  double average_cost() const { return total_cost / static_cast<double>(horizon); }
  double attempt_rate() const;
  double attempt_rate(std::size_t subsystem) const;
};

/// State of one trial. `run_slot` executes measure, trigger, contend,
/// transmit, estimate, control, cost and plant step, in that order.
class World {
 public:
  World(const PreparedScenario& prepared, const TrialSeeds& seeds, RunOptions options = {});
  World(World&&) noexcept;
  World& operator=(World&&) noexcept;
  ~World();

  SlotRecord run_slot();
  // Same as run_slot without materializing the record.
  void advance();
  long slot() const;
  const Telemetry& telemetry() const;
  Telemetry release();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Telemetry run_trial(const PreparedScenario& prepared, const TrialSeeds& seeds,
                    RunOptions options = {}, long trial_index = -1);
Telemetry run_trial(const PreparedScenario& prepared, long trial_index, RunOptions options = {});

struct SubsystemSummary {
  double attempt_rate = 0.0;  // attempts / K, averaged over trials
  double win_share = 0.0;     // share of all channel grants
  double gamma_rate = 0.0;    // successes / wins, pooled
  long attempts = 0;
  long wins = 0;
  long successes = 0;
  std::vector<long> t_histogram = std::vector<long>(kHistogramCap + 1, 0);
  long t_overflow = 0;
};

struct MonteCarloReport {
  long trials = 0;
  long horizon = 0;
  double mean_cost = 0.0;
  double cost_stderr = 0.0;
  double mean_attempt_rate = 0.0;
  double attempt_rate_stderr = 0.0;
  std::vector<double> trial_costs;
  std::vector<double> trial_attempt_rates;
  std::vector<SubsystemSummary> subsystems;
  long collision_violations = 0;
  long quantization_mismatches = 0;
  AuditStats coil_audit;
  AuditStats voi_audit;
};

/// Runs `scenario.trials` independent trials (seeded per trial index) on
/// `workers` threads and reduces them in trial order.
MonteCarloReport run_monte_carlo(const PreparedScenario& prepared, unsigned workers = 1,
                                 RunOptions options = {});

// tr(Pi W) + tr(Gamma E[e e'])
double theoretic_step_cost(const OfflineGains& gains, const Matrix& error_second_moment,
                           const Matrix& w);

struct StabilityReport {
  double decay_rate = 0.0;    // estimated lim mu(t)^(1/t)
  double bound = 0.0;         // 1 / rho(A)^2
  double margin = 0.0;        // bound - decay_rate
  bool satisfied = false;
  bool inconclusive = true;
  long fit_first_t = 0;
  long fit_last_t = 0;
  double overflow_mass = 0.0;
};

/// Geometric tail rate of the empirical t distribution by least squares on
/// log mu(t) over the longest run of bins t >= 1 holding at least
/// `min_count` samples each. Fewer than three such bins: inconclusive.
StabilityReport stability_diagnostic(std::span<const long> t_histogram, long overflow,
                                     const SubsystemModel& model, long min_count = 30);
std::vector<StabilityReport> stability_diagnostic(const Telemetry& telemetry,
                                                  const std::vector<SubsystemModel>& models);
std::vector<StabilityReport> stability_diagnostic(const MonteCarloReport& report,
                                                  const std::vector<SubsystemModel>& models);

namespace audit {

struct ExpectedCosts {
  double without_access;  // E[J | delta = 0]
  double with_access;     // E[J | delta = 1]
  double gain() const { return without_access - with_access; }
};

// Conventional sensors, conditioned on the estimator information at k-1.
ExpectedCosts conventional(const Matrix& p_prior, const SubsystemModel& model,
                           const OfflineGains& gains, double q);

// Smart sensors, conditioned on the sensor information at k.
ExpectedCosts smart(const Vector& e_check, const SubsystemModel& model,
                    const OfflineGains& gains, double q);

}  // namespace audit

}  // namespace wncs
