#include "wncs/policy.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "wncs/errors.hpp"

namespace wncs {

Architecture architecture_of(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSoD:
    case Scheme::kCoIL:
      return Architecture::kConventional;
    case Scheme::kVoI:
    case Scheme::kCoILBar:
      return Architecture::kSmart;
  }
  return Architecture::kConventional;
}

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSoD:
      return "sod";
    case Scheme::kCoIL:
      return "coil";
    case Scheme::kVoI:
      return "voi";
    case Scheme::kCoILBar:
      return "coilbar";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "sod") return Scheme::kSoD;
  if (lower == "coil") return Scheme::kCoIL;
  if (lower == "voi") return Scheme::kVoI;
  if (lower == "coilbar" || lower == "coil-bar" || lower == "coil_pbar") return Scheme::kCoILBar;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected sod, coil, voi, coilbar)");
}

TriggerDecision threshold_decision(double priority, double threshold) {
  priority = std::max(priority, 0.0);
  return {priority >= threshold, priority};
}

double coil_measure(const Matrix& p_prior, const SubsystemModel& model,
                    const OfflineGains& gains) {
  const Matrix corrected = riccati_correct(p_prior, model.c, model.v);
  return (gains.gamma_inf * (p_prior - corrected)).trace();
}

TriggerDecision evaluate_coil_from_prior(const Matrix& p_prior, const SubsystemModel& model,
                                         const OfflineGains& gains, double q, double threshold) {
  return threshold_decision(coil_measure(p_prior, model, gains) * q, threshold);
}

TriggerDecision evaluate_coil(const Matrix& p_post_prev, const SubsystemModel& model,
                              const OfflineGains& gains, double q, double threshold) {
  return evaluate_coil_from_prior(riccati_predict(p_post_prev, model.a, model.w), model, gains, q,
                                  threshold);
}

TriggerDecision evaluate_voi(const Vector& e_check, const OfflineGains& gains, double q,
                             double threshold) {
  return threshold_decision(e_check.dot(gains.gamma_inf * e_check) * q, threshold);
}

TriggerDecision evaluate_coil_bar(long t_prev, const SubsystemModel& model,
                                  const OfflineGains& gains, double q, double threshold) {
  if (t_prev < 0) throw ContractViolation("coil_bar: t_prev must be nonnegative");
  Matrix p = gains.p_bar;
  for (long s = 0; s <= t_prev; ++s) p = riccati_predict(p, model.a, model.w);
  return threshold_decision(q * (gains.gamma_inf * (p - gains.p_bar)).trace(), threshold);
}

TriggerDecision evaluate_sod(const Vector& y_now, const Vector& y_last_acked, double delta) {
  return threshold_decision((y_now - y_last_acked).norm(), delta);
}

CoilBarTable::CoilBarTable(const SubsystemModel& model, const OfflineGains& gains)
    : model_(&model),
      gains_(&gains),
      latest_(gains.p_bar) {}

double CoilBarTable::measure(long t_prev) {
  const auto needed = static_cast<std::size_t>(t_prev) + 1;
  while (values_.size() < needed) {
    latest_ = riccati_predict(latest_, model_->a, model_->w);
    values_.push_back((gains_->gamma_inf * (latest_ - gains_->p_bar)).trace());
  }
  return values_[needed - 1];
}

SleepHorizon vbt_sleep_horizon(const Matrix& p_post, const SubsystemModel& model,
                               const OfflineGains& gains, double q, double threshold, long cap) {
  Matrix p = p_post;
  for (long s = 0; s < cap; ++s) {
    if (evaluate_coil(p, model, gains, q, threshold).theta) return {s, false};
    p = riccati_predict(p, model.a, model.w);
  }
  return {cap, true};
}

}  // namespace wncs
