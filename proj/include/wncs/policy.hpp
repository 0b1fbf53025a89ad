#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wncs/dynamics.hpp"

namespace wncs {

enum class Scheme {
  kSoD,      // send-on-delta on raw outputs
  kCoIL,     // conventional sensors, variance-based trigger
  kVoI,      // smart sensors, measurement-based trigger
  kCoILBar,  // smart sensors, variance-based priority from t
};

enum class Architecture { kConventional, kSmart };

Architecture architecture_of(Scheme scheme);
std::string_view scheme_name(Scheme scheme);
// Accepts "sod", "coil", "voi", "coilbar" (case-insensitive; "coil-bar" and
// "coil_pbar" are aliases). Throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);
inline constexpr Scheme kAllSchemes[] = {Scheme::kSoD, Scheme::kCoIL, Scheme::kVoI,
                                         Scheme::kCoILBar};

struct PolicyConfig {
  Scheme scheme = Scheme::kCoIL;
  double threshold = 0.0;

  bool operator==(const PolicyConfig&) const = default;
};

struct TriggerDecision {
  bool theta = false;
  double priority = 0.0;
};

// theta = 1 iff priority >= threshold. Round-off below zero is clipped.
TriggerDecision threshold_decision(double priority, double threshold);

// tr(Gamma [P_prior - g(P_prior)])
double coil_measure(const Matrix& p_prior, const SubsystemModel& model,
                    const OfflineGains& gains);

// CoIL * q evaluated from the remote posterior at k-1 (prior = h(P)).
TriggerDecision evaluate_coil(const Matrix& p_post_prev, const SubsystemModel& model,
                              const OfflineGains& gains, double q, double threshold);

// Same, starting from an already-predicted covariance (used at slot 0, where
// the prior is the initial-state covariance).
TriggerDecision evaluate_coil_from_prior(const Matrix& p_prior, const SubsystemModel& model,
                                         const OfflineGains& gains, double q, double threshold);

TriggerDecision evaluate_voi(const Vector& e_check, const OfflineGains& gains, double q,
                             double threshold);

// q tr(Gamma [h^(t_prev+1)(P_bar) - P_bar])
TriggerDecision evaluate_coil_bar(long t_prev, const SubsystemModel& model,
                                  const OfflineGains& gains, double q, double threshold);

TriggerDecision evaluate_sod(const Vector& y_now, const Vector& y_last_acked, double delta);

// Memoized tr(Gamma [h^(t+1)(P_bar) - P_bar]) for the slot loop.
class CoilBarTable {
 public:
  CoilBarTable(const SubsystemModel& model, const OfflineGains& gains);

  double measure(long t_prev);

 private:
  const SubsystemModel* model_;
  const OfflineGains* gains_;
  Matrix latest_;  // h^(values_.size())(P_bar)
  std::vector<double> values_;
};

struct SleepHorizon {
  long slots = 0;
  bool saturated = false;
};

/// Slots a VBT sensor may sleep after a successful reception: the smallest
/// s >= 0 such that the CoIL priority evaluated s + 1 slots later (the
/// posterior propagated s times through h) reaches the threshold. Saturates
/// at `cap`.
SleepHorizon vbt_sleep_horizon(const Matrix& p_post, const SubsystemModel& model,
                               const OfflineGains& gains, double q, double threshold,
                               long cap = 10000);

}  // namespace wncs
