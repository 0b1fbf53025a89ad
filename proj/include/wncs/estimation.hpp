#pragma once

#include <optional>

#include "wncs/dynamics.hpp"

namespace wncs {

// Posterior of the remote estimator after slot k together with the number of
// slots since the last successful reception.
struct RemoteEstimatorState {
  Vector x_hat;
  Matrix p;
  long t_since_success = 0;
};

// One-step prediction for the current slot, before the packet outcome is known.
struct EstimatorPrior {
  Vector x;
  Matrix p;
};

// Smart sensor: local steady-state filter plus a replica of the remote
// estimator, kept in lockstep through ACK/NACK feedback.
struct SmartSensorState {
  Vector x_hat_s;
  RemoteEstimatorState replica;
};

// --- conventional sensors (raw measurements, Kalman filter with intermittent
// observations at the estimator) ---

EstimatorPrior conventional_predict(const RemoteEstimatorState& est, const Vector& u_prev,
                                    const SubsystemModel& model);

// Applies the packet outcome to a prior. `y` must be present iff gamma.
RemoteEstimatorState conventional_update(const EstimatorPrior& prior, long t_prev, bool gamma,
                                         const std::optional<Vector>& y,
                                         const SubsystemModel& model);

RemoteEstimatorState conventional_estimator_step(const RemoteEstimatorState& est,
                                                 const Vector& u_prev, bool gamma,
                                                 const std::optional<Vector>& y,
                                                 const SubsystemModel& model);

// --- smart sensors ---

// Corrects a local prediction with the steady gain: x + K (y - C x).
Vector smart_sensor_correct(const Vector& predicted, const Vector& y,
                            const SubsystemModel& model, const OfflineGains& gains);

SmartSensorState smart_sensor_filter_step(const SmartSensorState& sensor, const Vector& y,
                                          const Vector& u_prev, const SubsystemModel& model,
                                          const OfflineGains& gains);

// Remote estimate that holds at the next slot if no packet arrives:
// (A + B L) x_hat, covariance h(P).
EstimatorPrior smart_remote_predict(const RemoteEstimatorState& est, const SubsystemModel& model,
                                    const OfflineGains& gains);

RemoteEstimatorState smart_remote_update(const EstimatorPrior& prior, long t_prev, bool gamma,
                                         const std::optional<Vector>& x_hat_s,
                                         const OfflineGains& gains);

RemoteEstimatorState smart_remote_step(const RemoteEstimatorState& est, bool gamma,
                                       const std::optional<Vector>& x_hat_s,
                                       const SubsystemModel& model, const OfflineGains& gains);

// Sensor posterior minus the remote estimate that holds if nothing arrives
// this slot. The sensor evaluates it against its replica.
Vector innovation_discrepancy(const SmartSensorState& sensor, const SubsystemModel& model,
                              const OfflineGains& gains);

}  // namespace wncs
