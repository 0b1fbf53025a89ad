#pragma once

#include <Eigen/Dense>

#include "wncs/random.hpp"

namespace wncs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Offline solution of the LQG problem for one subsystem.
///
/// `pi_inf` solves the control DARE, `l_inf` is the induced state feedback,
/// `gamma_inf` weights the estimation error in the per-step cost, `p_bar` is
/// the steady posterior covariance of the sensor-side Kalman filter and
/// `k_steady` its gain.
struct OfflineGains {
  Matrix pi_inf;
  Matrix l_inf;
  Matrix gamma_inf;
  Matrix p_bar;
  Matrix k_steady;
};

struct FixedPointOptions {
  int max_iterations = 100000;
  double tolerance = 1e-12;  // successive Frobenius change
};

// Tolerances used by the validation helpers.
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kConditionLimit = 1e12;

Matrix symmetrize(const Matrix& x);

bool is_symmetric(const Matrix& x, double tol = 1e-9);
bool is_psd(const Matrix& x, double tol = kPsdTolerance);
bool is_pd(const Matrix& x);
double min_eigenvalue(const Matrix& symmetric);

// Numerical rank tests on the controllability / observability matrices.
bool is_controllable(const Matrix& a, const Matrix& b);
bool is_observable(const Matrix& a, const Matrix& c);

// Symmetric PSD square root via eigen-decomposition (negative eigenvalues
// inside tolerance are clipped to zero).
Matrix psd_sqrt(const Matrix& x);

// Solves `lhs * X = rhs` with a pivoted LU, refusing when cond(lhs) > 1e12.
Matrix guarded_solve(const Matrix& lhs, const Matrix& rhs);
Matrix guarded_inverse(const Matrix& x);

/// Infinite-horizon LQR value matrix by fixed-point iteration of the Riccati
/// difference equation from Pi_0 = Q. Throws ModelError when the rank tests
/// fail and SolverError when the iteration cap is reached.
Matrix solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                  const FixedPointOptions& options = {});

// Residual |Pi - (A'Pi A + Q - L'(B'Pi B + R)L)|_F for a candidate Pi.
double dare_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& pi);

Matrix feedback_gain(const Matrix& a, const Matrix& b, const Matrix& r, const Matrix& pi);
Matrix control_weight(const Matrix& b, const Matrix& r, const Matrix& l, const Matrix& pi);

// h(X) = A X A' + W
Matrix riccati_predict(const Matrix& x, const Matrix& a, const Matrix& w);
// g(X) = X - X C'(C X C' + V)^-1 C X
Matrix riccati_correct(const Matrix& x, const Matrix& c, const Matrix& v);

struct SteadyStateFilter {
  Matrix p_bar;
  Matrix k_steady;
};

/// Fixed point of g(h(X)) = X starting from P_0 = W, plus the matching gain
/// K = h(P) C' (C h(P) C' + V)^-1.
SteadyStateFilter steady_state_covariance(const Matrix& a, const Matrix& c, const Matrix& w,
                                          const Matrix& v, const FixedPointOptions& options = {});

double spectral_radius(const Matrix& a);

OfflineGains compute_offline_gains(const Matrix& a, const Matrix& b, const Matrix& c,
                                   const Matrix& q, const Matrix& r, const Matrix& w,
                                   const Matrix& v);

/// Draws from N(mean, cov). The covariance is factored once, with an
/// eigen-decomposition so singular PSD covariances are accepted.
class GaussianSampler {
 public:
  GaussianSampler() = default;
  GaussianSampler(Vector mean, const Matrix& cov);

  Vector sample(RandomStream& rng) const;
  Eigen::Index dimension() const { return mean_.size(); }

 private:
  Vector mean_;
  Matrix factor_;
};

Vector sample_gaussian(const Vector& mean, const Matrix& cov, RandomStream& rng);

}  // namespace wncs
