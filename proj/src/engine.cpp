#include "wncs/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "wncs/errors.hpp"

namespace wncs {

// --- scenario -------------------------------------------------------------

std::vector<std::string> validate(const Scenario& scenario) {
  std::vector<std::string> issues;
  auto add = [&](std::vector<std::string> more) {
    issues.insert(issues.end(), std::make_move_iterator(more.begin()),
                  std::make_move_iterator(more.end()));
  };
  const auto n = scenario.subsystems.size();
  if (n == 0) issues.emplace_back("subsystems: at least one subsystem is required");
  if (scenario.policies.size() != n) {
    issues.push_back("policies: expected " + std::to_string(n) + " entries, got " +
                     std::to_string(scenario.policies.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string path = "subsystems[" + std::to_string(i) + "]";
    add(validate(scenario.subsystems[i], path));
    const auto& q = scenario.subsystems[i].q_link;
    if (q.size() != 1 && q.size() != scenario.channels) {
      issues.push_back(path + ".q_link: expected 1 or " + std::to_string(scenario.channels) +
                       " probabilities, got " + std::to_string(q.size()));
    }
    if (i < scenario.policies.size() && !(scenario.policies[i].threshold >= 0.0)) {
      issues.push_back(path + ".policy.threshold: must be nonnegative");
    }
  }
  add(validate(scenario.layout, "network"));
  if (scenario.channels < 1) issues.emplace_back("network.channels: must be at least 1");
  if (scenario.horizon < 1) issues.emplace_back("horizon: must be at least 1");
  if (scenario.trials < 1) issues.emplace_back("trials: must be at least 1");

  if (scenario.layout.static_bits >= 1 && scenario.layout.static_bits < 63) {
    const Identifier max_static = scenario.layout.max_static();
    if (n > max_static) {
      issues.push_back("subsystems: " + std::to_string(n) + " subsystems exceed the " +
                       std::to_string(max_static) + " static identifiers available");
    }
    if (!scenario.static_ids.empty()) {
      if (scenario.static_ids.size() != n) {
        issues.push_back("network.static_ids: expected " + std::to_string(n) + " entries");
      }
      std::set<Identifier> seen;
      for (std::size_t i = 0; i < scenario.static_ids.size(); ++i) {
        const auto id = scenario.static_ids[i];
        const std::string path = "network.static_ids[" + std::to_string(i) + "]";
        if (id > max_static) issues.push_back(path + ": exceeds " + std::to_string(max_static));
        if (!seen.insert(id).second) issues.push_back(path + ": duplicate static identifier");
      }
    }
  }
  for (const auto& [scheme, thresholds] : scenario.sweep) {
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      if (!(thresholds[j] >= 0.0)) {
        issues.push_back("sweep." + std::string(scheme_name(scheme)) + "[" + std::to_string(j) +
                         "]: threshold must be nonnegative");
      }
    }
  }
  return issues;
}

Scenario with_policy(Scenario scenario, const PolicyConfig& policy) {
  scenario.policies.assign(scenario.subsystems.size(), policy);
  return scenario;
}

PreparedScenario prepare(const Scenario& scenario) {
  if (auto issues = validate(scenario); !issues.empty()) throw ConfigError(std::move(issues));
  PreparedScenario prepared{scenario, {}, {}};
  for (const auto& model : scenario.subsystems) {
    prepared.gains.push_back(compute_offline_gains(model));
  }
  if (scenario.static_ids.empty()) {
    for (std::size_t i = 0; i < scenario.subsystems.size(); ++i) {
      prepared.static_ids.push_back(default_static_id(scenario.layout, static_cast<int>(i) + 1));
    }
  } else {
    prepared.static_ids = scenario.static_ids;
  }
  return prepared;
}

TrialSeeds TrialSeeds::for_trial(std::uint64_t base_seed, long trial_index) {
  const auto seed = trial_seed(base_seed, static_cast<std::uint64_t>(trial_index));
  return {seed, seed, seed};
}

void AuditStats::merge(const AuditStats& other) {
  slots += other.slots;
  agreements += other.agreements;
  value_ties += other.value_ties;
  quantization_ties += other.quantization_ties;
}

double Telemetry::attempt_rate() const {
  long attempts = 0;
  for (const auto& s : subsystems) attempts += s.attempts;
  return static_cast<double>(attempts) /
         (static_cast<double>(horizon) * static_cast<double>(subsystems.size()));
}

double Telemetry::attempt_rate(std::size_t subsystem) const {
  return static_cast<double>(subsystems.at(subsystem).attempts) / static_cast<double>(horizon);
}

// --- audit oracles ----------------------------------------------------------

namespace audit {

ExpectedCosts conventional(const Matrix& p_prior, const SubsystemModel& model,
                           const OfflineGains& gains, double q) {
  const Eigen::Index n = model.state_dim();
  const double process = (gains.pi_inf * model.w).trace();
  // Joseph-form posterior with an explicit Kalman gain.
  const Matrix s = model.c * p_prior * model.c.transpose() + model.v;
  const Matrix k = p_prior * model.c.transpose() * Eigen::FullPivLU<Matrix>(s).inverse();
  const Matrix i_kc = Matrix::Identity(n, n) - k * model.c;
  const Matrix posterior = i_kc * p_prior * i_kc.transpose() + k * model.v * k.transpose();
  const double prior_term = (gains.gamma_inf * p_prior).trace();
  const double posterior_term = (gains.gamma_inf * posterior).trace();
  return {process + prior_term, process + (1.0 - q) * prior_term + q * posterior_term};
}

ExpectedCosts smart(const Vector& e_check, const SubsystemModel& model,
                    const OfflineGains& gains, double q) {
  const double process = (gains.pi_inf * model.w).trace();
  const double filter = (gains.gamma_inf * gains.p_bar).trace();
  const double discrepancy = (gains.gamma_inf * (e_check * e_check.transpose())).trace();
  return {process + filter + discrepancy, process + filter * q + (1.0 - q) * (filter + discrepancy)};
}

}  // namespace audit

// --- world ------------------------------------------------------------------

namespace {

struct Runtime {
  const SubsystemModel* model = nullptr;
  const OfflineGains* gains = nullptr;
  PolicyConfig policy;
  Architecture arch = Architecture::kConventional;
  Identifier static_id = 0;

  PlantState plant;
  RemoteEstimatorState remote;
  SmartSensorState sensor;
  EstimatorPrior initial_prior;
  Vector y_last_acked;
  Vector u_prev;

  RandomStream plant_rng, measurement_rng, channel_rng;
  GaussianSampler process_noise, measurement_noise;
  std::optional<CoilBarTable> coil_bar;
};

// Scratch values of one subsystem within the current slot.
struct SlotScratch {
  Vector w;
  Vector y;
  EstimatorPrior prior;
  EstimatorPrior replica_prior;
  Vector e_check;
  double base_priority = 0.0;  // measure before the link factor
  std::vector<double> priorities;  // per channel
  TriggerDecision decision;
  int channel = -1;
  bool gamma = false;
};

bool same_state(const RemoteEstimatorState& a, const RemoteEstimatorState& b) {
  return a.t_since_success == b.t_since_success && a.x_hat.size() == b.x_hat.size() &&
         a.x_hat == b.x_hat && a.p.rows() == b.p.rows() && a.p == b.p;
}

}  // namespace

struct World::Impl {
  const PreparedScenario* prepared;
  RunOptions options;
  std::vector<Runtime> subsystems;
  std::vector<SlotScratch> scratch;
  Telemetry telemetry;
  long k = 0;

  Impl(const PreparedScenario& p, const TrialSeeds& seeds, RunOptions opts)
      : prepared(&p), options(opts) {
    const auto& scenario = p.scenario;
    const auto n = scenario.subsystems.size();
    subsystems.resize(n);
    scratch.resize(n);
    telemetry.subsystems.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& rt = subsystems[i];
      const auto& model = scenario.subsystems[i];
      const auto& gains = p.gains[i];
      rt.model = &model;
      rt.gains = &gains;
      rt.policy = scenario.policies[i];
      rt.arch = architecture_of(rt.policy.scheme);
      rt.static_id = p.static_ids[i];
      rt.plant_rng = RandomStream(derive_seed(seeds.plant, i, Substream::kPlant));
      rt.measurement_rng = RandomStream(derive_seed(seeds.measurement, i, Substream::kMeasurement));
      rt.channel_rng = RandomStream(derive_seed(seeds.channel, i, Substream::kChannel));
      const Eigen::Index nx = model.state_dim();
      rt.process_noise = GaussianSampler(Vector::Zero(nx), model.w);
      rt.measurement_noise = GaussianSampler(Vector::Zero(model.output_dim()), model.v);
      rt.plant = {GaussianSampler(model.x0_mean, model.x0_cov).sample(rt.plant_rng), 0};

      // Before slot 0 the estimator holds the initial-state prior; t counts
      // as if a packet had just arrived.
      rt.initial_prior = {model.x0_mean, model.x0_cov};
      rt.remote = {model.x0_mean, model.x0_cov, 0};
      rt.sensor = {model.x0_mean, rt.remote};
      rt.y_last_acked = model.c * model.x0_mean;
      rt.u_prev = Vector::Zero(model.input_dim());
      if (rt.policy.scheme == Scheme::kCoILBar) rt.coil_bar.emplace(model, gains);

      auto& tel = telemetry.subsystems[i];
      tel.error_sum = Vector::Zero(nx);
      tel.error_outer_sum = Matrix::Zero(nx, nx);
      tel.sensor_error_outer_sum = Matrix::Zero(nx, nx);
      tel.error_outer_by_t.assign(static_cast<std::size_t>(options.diagnostic_t_max) + 1,
                                  Matrix::Zero(nx, nx));
      tel.count_by_t.assign(static_cast<std::size_t>(options.diagnostic_t_max) + 1, 0);
    }
    telemetry.horizon = 0;
  }

  void sense_and_trigger(std::size_t i) {
    auto& rt = subsystems[i];
    auto& s = scratch[i];
    const auto& model = *rt.model;
    const auto& gains = *rt.gains;

    // w then v, each from the subsystem's own substream.
    s.w = rt.process_noise.sample(rt.plant_rng);
    s.y = measure(rt.plant, rt.measurement_noise.sample(rt.measurement_rng), model.c);

    if (rt.arch == Architecture::kConventional) {
      s.prior = k == 0 ? rt.initial_prior : conventional_predict(rt.remote, rt.u_prev, model);
    } else {
      s.prior = k == 0 ? rt.initial_prior : smart_remote_predict(rt.remote, model, gains);
      s.replica_prior =
          k == 0 ? rt.initial_prior : smart_remote_predict(rt.sensor.replica, model, gains);
      if (k == 0) {
        rt.sensor.x_hat_s = smart_sensor_correct(model.x0_mean, s.y, model, gains);
      } else {
        const Vector u_seen = control_input(gains.l_inf, rt.sensor.replica.x_hat);
        rt.sensor = smart_sensor_filter_step(rt.sensor, s.y, u_seen, model, gains);
      }
      s.e_check = rt.sensor.x_hat_s - s.replica_prior.x;
    }

    switch (rt.policy.scheme) {
      case Scheme::kCoIL:
        s.base_priority = coil_measure(s.prior.p, model, gains);
        break;
      case Scheme::kVoI:
        s.base_priority = s.e_check.dot(gains.gamma_inf * s.e_check);
        break;
      case Scheme::kCoILBar:
        s.base_priority = rt.coil_bar->measure(rt.sensor.replica.t_since_success);
        break;
      case Scheme::kSoD:
        s.base_priority = (s.y - rt.y_last_acked).norm();
        break;
    }
    const std::size_t channels = prepared->scenario.channels;
    s.priorities.assign(channels, 0.0);
    double best = 0.0;
    for (std::size_t j = 0; j < channels; ++j) {
      const double factor = rt.policy.scheme == Scheme::kSoD ? 1.0 : model.link_probability(j);
      s.priorities[j] = std::max(0.0, s.base_priority * factor);
      best = std::max(best, s.priorities[j]);
    }
    s.decision = threshold_decision(best, rt.policy.threshold);
    s.channel = -1;
    s.gamma = false;
  }

  void audit_slot(const std::vector<std::size_t>& contenders) {
    if (!options.audit || contenders.size() < 2 || prepared->scenario.channels != 1) return;
    const Scheme scheme = subsystems[contenders.front()].policy.scheme;
    if (scheme != Scheme::kCoIL && scheme != Scheme::kVoI) return;
    for (auto i : contenders) {
      if (subsystems[i].policy.scheme != scheme) return;
    }
    AuditStats& stats = scheme == Scheme::kCoIL ? telemetry.coil_audit : telemetry.voi_audit;
    ++stats.slots;

    std::vector<std::size_t> order = contenders;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scratch[a].priorities[0] > scratch[b].priorities[0];
    });
    const double top = scratch[order[0]].priorities[0];
    const double second = scratch[order[1]].priorities[0];
    if (top - second <= 1e-12) {
      ++stats.value_ties;
      return;
    }
    const auto& layout = prepared->scenario.layout;
    if (dynamic_identifier(top, layout) == dynamic_identifier(second, layout)) {
      ++stats.quantization_ties;
      return;
    }

    std::size_t oracle_best = contenders.front();
    double oracle_value = -INFINITY;
    for (auto i : contenders) {
      const auto& rt = subsystems[i];
      const double q = rt.model->link_probability(0);
      double gain;
      if (scheme == Scheme::kCoIL) {
        gain = audit::conventional(scratch[i].prior.p, *rt.model, *rt.gains, q).gain();
      } else {
        // Discrepancy taken against the actual remote estimator.
        const Vector e = rt.sensor.x_hat_s - scratch[i].prior.x;
        gain = audit::smart(e, *rt.model, *rt.gains, q).gain();
      }
      if (gain > oracle_value) {
        oracle_value = gain;
        oracle_best = i;
      }
    }
    if (oracle_best == order[0]) ++stats.agreements;
  }

  void contend_and_transmit() {
    const auto& scenario = prepared->scenario;
    const std::size_t channels = scenario.channels;
    std::vector<std::size_t> contenders;
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
      if (scratch[i].decision.theta) contenders.push_back(i);
    }
    audit_slot(contenders);
    if (contenders.empty()) return;

    std::vector<std::optional<int>> winners;
    if (channels == 1) {
      std::vector<Contender> frame;
      for (auto i : contenders) {
        frame.push_back({static_cast<int>(i),
                         build_identifier(scratch[i].priorities[0], scenario.layout,
                                          static_cast<std::int64_t>(subsystems[i].static_id))});
      }
      winners.push_back(arbitrate(frame));
    } else {
      std::vector<MultiChannelContender> frame;
      for (auto i : contenders) {
        MultiChannelContender c{static_cast<int>(i), {}};
        for (std::size_t j = 0; j < channels; ++j) {
          c.ids.push_back(build_identifier(scratch[i].priorities[j], scenario.layout,
                                           static_cast<std::int64_t>(subsystems[i].static_id)));
        }
        frame.push_back(std::move(c));
      }
      winners = arbitrate_multichannel(frame, channels);
    }

    // Exact-real argmax on channel 0 versus the TOD outcome.
    if (channels == 1) {
      std::size_t exact = contenders.front();
      for (auto i : contenders) {
        if (scratch[i].priorities[0] > scratch[exact].priorities[0]) exact = i;
      }
      if (winners[0] && static_cast<std::size_t>(*winners[0]) != exact &&
          scratch[exact].priorities[0] > scratch[*winners[0]].priorities[0]) {
        ++telemetry.quantization_mismatches;
      }
    }

    bool busy = false;
    for (std::size_t j = 0; j < channels; ++j) {
      if (!winners[j]) continue;
      auto& s = scratch[static_cast<std::size_t>(*winners[j])];
      if (s.channel != -1) {
        ++telemetry.collision_violations;  // same subsystem on two channels
        continue;
      }
      s.channel = static_cast<int>(j);
      busy = true;
    }
    if (busy) ++telemetry.busy_slots;

    // Per-channel single-winner check over the realized delta flags.
    std::vector<int> per_channel(channels, 0);
    for (const auto& s : scratch) {
      if (s.channel >= 0) ++per_channel[static_cast<std::size_t>(s.channel)];
    }
    for (int count : per_channel) {
      if (count > 1) ++telemetry.collision_violations;
    }

    for (std::size_t i = 0; i < subsystems.size(); ++i) {
      auto& s = scratch[i];
      if (s.channel < 0) continue;
      auto& rt = subsystems[i];
      s.gamma = transmit(rt.model->link_probability(static_cast<std::size_t>(s.channel)),
                         rt.channel_rng);
    }
  }

  void estimate_control_step(std::size_t i, SlotRecord* record) {
    auto& rt = subsystems[i];
    auto& s = scratch[i];
    const auto& model = *rt.model;
    const auto& gains = *rt.gains;
    auto& tel = telemetry.subsystems[i];

    if (rt.arch == Architecture::kConventional) {
      std::optional<Vector> payload;
      if (s.gamma) payload = s.y;
      rt.remote = conventional_update(s.prior, rt.remote.t_since_success, s.gamma, payload, model);
      if (s.gamma) rt.y_last_acked = s.y;
    } else {
      std::optional<Vector> payload;
      if (s.gamma) payload = rt.sensor.x_hat_s;
      rt.remote = smart_remote_update(s.prior, rt.remote.t_since_success, s.gamma, payload, gains);
      rt.sensor.replica = smart_remote_update(s.replica_prior, rt.sensor.replica.t_since_success,
                                              s.gamma, payload, gains);
      if (!same_state(rt.remote, rt.sensor.replica)) ++tel.replica_mismatches;
    }

    const Vector u = control_input(gains.l_inf, rt.remote.x_hat);
    const Vector& x = rt.plant.x;
    const double cost = x.dot(model.q * x) + u.dot(model.r * u);

    telemetry.total_cost += cost;
    tel.cost_sum += cost;
    if (s.decision.theta) ++tel.attempts;
    if (s.channel >= 0) ++tel.wins;
    if (s.gamma) ++tel.successes;
    const long t = rt.remote.t_since_success;
    if (t <= kHistogramCap) {
      ++tel.t_histogram[static_cast<std::size_t>(t)];
    } else {
      ++tel.t_overflow;
    }
    tel.max_t = std::max(tel.max_t, t);
    const Vector error = x - rt.remote.x_hat;
    tel.error_sum += error;
    const Matrix outer = error * error.transpose();
    tel.error_outer_sum += outer;
    if (t <= options.diagnostic_t_max) {
      tel.error_outer_by_t[static_cast<std::size_t>(t)] += outer;
      ++tel.count_by_t[static_cast<std::size_t>(t)];
    }
    if (rt.arch == Architecture::kSmart) {
      const Vector local = x - rt.sensor.x_hat_s;
      tel.sensor_error_outer_sum += local * local.transpose();
    }

    if (record != nullptr) {
      SubsystemSlot slot;
      slot.x = x;
      slot.x_hat = rt.remote.x_hat;
      slot.priority = s.decision.priority;
      slot.theta = s.decision.theta;
      slot.delta = s.channel >= 0;
      slot.gamma = s.gamma;
      slot.channel = s.channel;
      slot.t = t;
      slot.cost = cost;
      record->subsystems.push_back(std::move(slot));
    }

    rt.plant = step_plant(rt.plant, model, u, s.w);
    rt.u_prev = u;
  }

  void step(SlotRecord* record) {
    SlotRecord local;
    if (record == nullptr && options.record_slots) record = &local;
    if (record != nullptr) record->k = k;
    for (std::size_t i = 0; i < subsystems.size(); ++i) sense_and_trigger(i);
    contend_and_transmit();
    for (std::size_t i = 0; i < subsystems.size(); ++i) estimate_control_step(i, record);
    ++k;
    telemetry.horizon = k;
    if (options.record_slots) telemetry.slots.push_back(*record);
  }
};

World::World(const PreparedScenario& prepared, const TrialSeeds& seeds, RunOptions options)
    : impl_(std::make_unique<Impl>(prepared, seeds, options)) {}
World::World(World&&) noexcept = default;
World& World::operator=(World&&) noexcept = default;
World::~World() = default;

SlotRecord World::run_slot() {
  SlotRecord record;
  impl_->step(&record);
  return record;
}
void World::advance() { impl_->step(nullptr); }
long World::slot() const { return impl_->k; }
const Telemetry& World::telemetry() const { return impl_->telemetry; }
Telemetry World::release() { return std::move(impl_->telemetry); }

Telemetry run_trial(const PreparedScenario& prepared, const TrialSeeds& seeds, RunOptions options,
                    long trial_index) {
  World world(prepared, seeds, options);
  const long horizon = prepared.scenario.horizon;
  for (long k = 0; k < horizon; ++k) {
    try {
      world.advance();
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(e.what(), trial_index, k);
    }
  }
  return world.release();
}

Telemetry run_trial(const PreparedScenario& prepared, long trial_index, RunOptions options) {
  return run_trial(prepared, TrialSeeds::for_trial(prepared.scenario.seed, trial_index), options,
                   trial_index);
}

// --- Monte Carlo ------------------------------------------------------------

namespace {

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

MonteCarloReport run_monte_carlo(const PreparedScenario& prepared, unsigned workers,
                                 RunOptions options) {
  const long trials = prepared.scenario.trials;
  std::vector<Telemetry> results(static_cast<std::size_t>(trials));

  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (long t = next++; t < trials; t = next++) {
      try {
        results[static_cast<std::size_t>(t)] = run_trial(prepared, t, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(trials)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloReport report;
  report.trials = trials;
  report.horizon = prepared.scenario.horizon;
  const auto n = prepared.scenario.subsystems.size();
  report.subsystems.resize(n);
  for (const auto& tel : results) {
    report.trial_costs.push_back(tel.average_cost());
    report.trial_attempt_rates.push_back(tel.attempt_rate());
    report.collision_violations += tel.collision_violations;
    report.quantization_mismatches += tel.quantization_mismatches;
    report.coil_audit.merge(tel.coil_audit);
    report.voi_audit.merge(tel.voi_audit);
    for (std::size_t i = 0; i < n; ++i) {
      auto& sum = report.subsystems[i];
      const auto& s = tel.subsystems[i];
      sum.attempts += s.attempts;
      sum.wins += s.wins;
      sum.successes += s.successes;
      for (std::size_t b = 0; b < s.t_histogram.size(); ++b) sum.t_histogram[b] += s.t_histogram[b];
      sum.t_overflow += s.t_overflow;
    }
  }
  report.mean_cost = mean_of(report.trial_costs);
  report.cost_stderr = stderr_of(report.trial_costs, report.mean_cost);
  report.mean_attempt_rate = mean_of(report.trial_attempt_rates);
  report.attempt_rate_stderr = stderr_of(report.trial_attempt_rates, report.mean_attempt_rate);
  long total_wins = 0;
  for (const auto& s : report.subsystems) total_wins += s.wins;
  const double slots = static_cast<double>(trials) * static_cast<double>(report.horizon);
  for (auto& s : report.subsystems) {
    s.attempt_rate = static_cast<double>(s.attempts) / slots;
    s.win_share = total_wins > 0 ? static_cast<double>(s.wins) / static_cast<double>(total_wins) : 0.0;
    s.gamma_rate = s.wins > 0 ? static_cast<double>(s.successes) / static_cast<double>(s.wins) : 0.0;
  }
  return report;
}

double theoretic_step_cost(const OfflineGains& gains, const Matrix& error_second_moment,
                           const Matrix& w) {
  return (gains.pi_inf * w).trace() + (gains.gamma_inf * error_second_moment).trace();
}

// --- stability diagnostic ---------------------------------------------------

StabilityReport stability_diagnostic(std::span<const long> t_histogram, long overflow,
                                     const SubsystemModel& model, long min_count) {
  StabilityReport report;
  const double rho = spectral_radius(model.a);
  report.bound = 1.0 / (rho * rho);

  double total = static_cast<double>(overflow);
  for (long c : t_histogram) total += static_cast<double>(c);
  if (total <= 0.0) return report;
  report.overflow_mass = static_cast<double>(overflow) / total;

  const double beyond_zero = total - (t_histogram.empty() ? 0.0 : static_cast<double>(t_histogram[0]));
  if (beyond_zero <= 0.0) {
    // Every slot delivered: mu(t) = 0 for t >= 1.
    report.decay_rate = 0.0;
    report.inconclusive = false;
    report.margin = report.bound;
    report.satisfied = true;
    return report;
  }

  std::size_t last = 0;
  for (std::size_t t = 1; t < t_histogram.size() && t_histogram[t] >= min_count; ++t) last = t;
  if (last < 3) return report;

  // Least squares slope of log mu(t) on t over [1, last].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(last);
  for (std::size_t t = 1; t <= last; ++t) {
    const double x = static_cast<double>(t);
    const double y = std::log(static_cast<double>(t_histogram[t]) / total);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  report.decay_rate = std::exp(slope);
  report.fit_first_t = 1;
  report.fit_last_t = static_cast<long>(last);
  report.inconclusive = false;
  report.margin = report.bound - report.decay_rate;
  report.satisfied = report.decay_rate < report.bound;
  return report;
}

std::vector<StabilityReport> stability_diagnostic(const Telemetry& telemetry,
                                                  const std::vector<SubsystemModel>& models) {
  std::vector<StabilityReport> out;
  for (std::size_t i = 0; i < telemetry.subsystems.size(); ++i) {
    const auto& s = telemetry.subsystems[i];
    out.push_back(stability_diagnostic(s.t_histogram, s.t_overflow, models.at(i)));
  }
  return out;
}

std::vector<StabilityReport> stability_diagnostic(const MonteCarloReport& report,
                                                  const std::vector<SubsystemModel>& models) {
  std::vector<StabilityReport> out;
  for (std::size_t i = 0; i < report.subsystems.size(); ++i) {
    const auto& s = report.subsystems[i];
    out.push_back(stability_diagnostic(s.t_histogram, s.t_overflow, models.at(i)));
  }
  return out;
}

}  // namespace wncs
