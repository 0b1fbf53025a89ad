#pragma once

#include <string>
#include <vector>

#include "wncs/numerics.hpp"

namespace wncs {

// Constants of one control loop. `q_link` holds one success probability per
// channel (a single entry for the single-channel network).
struct SubsystemModel {
  int index = 1;
  Matrix a, b, c;
  Matrix q, r;
  Matrix w, v;
  Vector x0_mean;
  Matrix x0_cov;
  std::vector<double> q_link{1.0};

  Eigen::Index state_dim() const { return a.rows(); }
  Eigen::Index input_dim() const { return b.cols(); }
  Eigen::Index output_dim() const { return c.rows(); }

  double link_probability(std::size_t channel = 0) const {
    return q_link.size() == 1 ? q_link.front() : q_link.at(channel);
  }
};

// Every violated invariant, each prefixed by `path` ("subsystems[0].R: ...").
std::vector<std::string> validate(const SubsystemModel& model, const std::string& path = "");

OfflineGains compute_offline_gains(const SubsystemModel& model);

struct PlantState {
  Vector x;
  long k = 0;
};

// x+ = A x + B u + w
PlantState step_plant(const PlantState& state, const SubsystemModel& model, const Vector& u,
                      const Vector& w);

// y = C x + v
Vector measure(const PlantState& state, const Vector& v, const Matrix& c);

// Certainty-equivalence law u = L x_hat(k|k).
Vector control_input(const Matrix& l_inf, const Vector& x_hat_posterior);

}  // namespace wncs
