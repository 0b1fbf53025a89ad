#include "wncs/dynamics.hpp"

#include <cmath>

#include "wncs/errors.hpp"

namespace wncs {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

std::vector<std::string> validate(const SubsystemModel& model, const std::string& path) {
  std::vector<std::string> issues;
  auto issue = [&](const std::string& field, const std::string& what) {
    issues.push_back((path.empty() ? field : path + "." + field) + ": " + what);
  };
  auto shape = [&](const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* field) {
    if (m.rows() != rows || m.cols() != cols) {
      issue(field, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                       dims(m));
      return false;
    }
    if (!m.allFinite()) {
      issue(field, "entries must be finite");
      return false;
    }
    return true;
  };

  const Eigen::Index n = model.a.rows();
  if (n == 0 || model.a.cols() != n) {
    issue("A", "must be a non-empty square matrix, got " + dims(model.a));
    return issues;
  }
  if (!model.a.allFinite()) issue("A", "entries must be finite");
  const Eigen::Index m = model.b.cols();
  const Eigen::Index p = model.c.rows();
  if (m == 0) issue("B", "must have at least one column");
  if (p == 0) issue("C", "must have at least one row");
  shape(model.b, n, m, "B");
  shape(model.c, p, n, "C");
  if (shape(model.q, n, n, "Q") && !is_psd(model.q)) issue("Q", "must be symmetric PSD");
  if (shape(model.r, m, m, "R") && !is_pd(model.r)) issue("R", "must be symmetric positive definite");
  if (shape(model.w, n, n, "W") && !is_psd(model.w)) issue("W", "must be symmetric PSD");
  if (shape(model.v, p, p, "V") && !is_psd(model.v)) issue("V", "must be symmetric PSD");
  if (model.x0_mean.size() != n) {
    issue("x0_mean", "expected length " + std::to_string(n) + ", got " +
                         std::to_string(model.x0_mean.size()));
  } else if (!model.x0_mean.allFinite()) {
    issue("x0_mean", "entries must be finite");
  }
  if (shape(model.x0_cov, n, n, "x0_cov") && !is_psd(model.x0_cov)) {
    issue("x0_cov", "must be symmetric PSD");
  }
  if (model.q_link.empty()) issue("q_link", "needs at least one probability");
  for (std::size_t j = 0; j < model.q_link.size(); ++j) {
    const double qj = model.q_link[j];
    if (!(qj >= 0.0 && qj <= 1.0)) {
      issue(model.q_link.size() == 1 ? "q_link" : "q_link[" + std::to_string(j) + "]",
            "probability " + std::to_string(qj) + " outside [0, 1]");
    }
  }
  return issues;
}

OfflineGains compute_offline_gains(const SubsystemModel& model) {
  if (auto issues = validate(model); !issues.empty()) throw ModelError(issues.front());
  return compute_offline_gains(model.a, model.b, model.c, model.q, model.r, model.w, model.v);
}

PlantState step_plant(const PlantState& state, const SubsystemModel& model, const Vector& u,
                      const Vector& w) {
  return {model.a * state.x + model.b * u + w, state.k + 1};
}

Vector measure(const PlantState& state, const Vector& v, const Matrix& c) {
  return c * state.x + v;
}

Vector control_input(const Matrix& l_inf, const Vector& x_hat_posterior) {
  return l_inf * x_hat_posterior;
}

}  // namespace wncs
