#include "wncs/estimation.hpp"

#include "wncs/errors.hpp"

namespace wncs {

EstimatorPrior conventional_predict(const RemoteEstimatorState& est, const Vector& u_prev,
                                    const SubsystemModel& model) {
  return {model.a * est.x_hat + model.b * u_prev, riccati_predict(est.p, model.a, model.w)};
}

RemoteEstimatorState conventional_update(const EstimatorPrior& prior, long t_prev, bool gamma,
                                         const std::optional<Vector>& y,
                                         const SubsystemModel& model) {
  if (gamma != y.has_value()) {
    throw ContractViolation("conventional estimator: measurement must be present iff gamma = 1");
  }
  if (!gamma) return {prior.x, prior.p, t_prev + 1};

  const Matrix cp = model.c * prior.p;
  const Matrix innovation_cov = cp * model.c.transpose() + model.v;
  // K' = S^-1 C P since S and P are symmetric.
  const Matrix gain = guarded_solve(innovation_cov, cp).transpose();
  Vector x_hat = prior.x + gain * (*y - model.c * prior.x);
  return {std::move(x_hat), riccati_correct(prior.p, model.c, model.v), 0};
}

RemoteEstimatorState conventional_estimator_step(const RemoteEstimatorState& est,
                                                 const Vector& u_prev, bool gamma,
                                                 const std::optional<Vector>& y,
                                                 const SubsystemModel& model) {
  return conventional_update(conventional_predict(est, u_prev, model), est.t_since_success, gamma,
                             y, model);
}

Vector smart_sensor_correct(const Vector& predicted, const Vector& y,
                            const SubsystemModel& model, const OfflineGains& gains) {
  return predicted + gains.k_steady * (y - model.c * predicted);
}

SmartSensorState smart_sensor_filter_step(const SmartSensorState& sensor, const Vector& y,
                                          const Vector& u_prev, const SubsystemModel& model,
                                          const OfflineGains& gains) {
  const Vector predicted = model.a * sensor.x_hat_s + model.b * u_prev;
  return {smart_sensor_correct(predicted, y, model, gains), sensor.replica};
}

EstimatorPrior smart_remote_predict(const RemoteEstimatorState& est, const SubsystemModel& model,
                                    const OfflineGains& gains) {
  return {(model.a + model.b * gains.l_inf) * est.x_hat, riccati_predict(est.p, model.a, model.w)};
}

RemoteEstimatorState smart_remote_update(const EstimatorPrior& prior, long t_prev, bool gamma,
                                         const std::optional<Vector>& x_hat_s,
                                         const OfflineGains& gains) {
  if (gamma != x_hat_s.has_value()) {
    throw ContractViolation("smart remote estimator: payload must be present iff gamma = 1");
  }
  if (gamma) return {*x_hat_s, gains.p_bar, 0};
  return {prior.x, prior.p, t_prev + 1};
}

RemoteEstimatorState smart_remote_step(const RemoteEstimatorState& est, bool gamma,
                                       const std::optional<Vector>& x_hat_s,
                                       const SubsystemModel& model, const OfflineGains& gains) {
  return smart_remote_update(smart_remote_predict(est, model, gains), est.t_since_success, gamma,
                             x_hat_s, gains);
}

Vector innovation_discrepancy(const SmartSensorState& sensor, const SubsystemModel& model,
                              const OfflineGains& gains) {
  return sensor.x_hat_s - (model.a + model.b * gains.l_inf) * sensor.replica.x_hat;
}

}  // namespace wncs
