#include "wncs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wncs/errors.hpp"

namespace wncs {

namespace {

void require_square(const Matrix& x, const char* name) {
  if (x.rows() != x.cols()) {
    throw ModelError(std::string(name) + " must be square, got " + std::to_string(x.rows()) +
                     "x" + std::to_string(x.cols()));
  }
}

void require_shape(const Matrix& x, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (x.rows() != rows || x.cols() != cols) {
    throw ModelError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()));
  }
}

Eigen::Index numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = 1e-9 * s(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return rank;
}

// Absolute tolerance, widened only where round-off in the map itself exceeds it.
double scaled_tolerance(const FixedPointOptions& options, const Matrix& x) {
  constexpr double kRoundoffFloor = 1e3 * std::numeric_limits<double>::epsilon();
  return std::max(options.tolerance, kRoundoffFloor * x.norm());
}

}  // namespace

Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

bool is_symmetric(const Matrix& x, double tol) {
  if (x.rows() != x.cols()) return false;
  return (x - x.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, x.cwiseAbs().maxCoeff());
}

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& x, double tol) {
  if (!is_symmetric(x)) return false;
  if (!x.allFinite()) return false;
  return min_eigenvalue(x) >= -tol * std::max(1.0, x.norm());
}

bool is_pd(const Matrix& x) {
  if (!is_symmetric(x) || !x.allFinite()) return false;
  Eigen::LLT<Matrix> llt(symmetrize(x));
  return llt.info() == Eigen::Success;
}

bool is_controllable(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  Matrix ctrb(n, n * b.cols());
  Matrix block = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    ctrb.middleCols(i * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return numerical_rank(ctrb) == n;
}

bool is_observable(const Matrix& a, const Matrix& c) {
  return is_controllable(a.transpose(), c.transpose());
}

Matrix psd_sqrt(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(x));
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix guarded_solve(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows() != lhs.cols() || lhs.rows() != rhs.rows()) {
    throw NumericError("guarded_solve: dimension mismatch");
  }
  Eigen::PartialPivLU<Matrix> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kConditionLimit) {
    throw NumericError("matrix is singular or ill-conditioned (condition estimate " +
                       std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) + ")");
  }
  return lu.solve(rhs);
}

Matrix guarded_inverse(const Matrix& x) {
  return guarded_solve(x, Matrix::Identity(x.rows(), x.cols()));
}

Matrix feedback_gain(const Matrix& a, const Matrix& b, const Matrix& r, const Matrix& pi) {
  const Matrix btp = b.transpose() * pi;
  return -guarded_solve(btp * b + r, btp * a);
}

Matrix control_weight(const Matrix& b, const Matrix& r, const Matrix& l, const Matrix& pi) {
  if (b.cols() != r.rows() || l.rows() != b.cols() || pi.rows() != b.rows()) {
    throw ModelError("control_weight: dimension mismatch");
  }
  return symmetrize(l.transpose() * (b.transpose() * pi * b + r) * l);
}

double dare_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& pi) {
  const Matrix l = feedback_gain(a, b, r, pi);
  const Matrix rhs =
      a.transpose() * pi * a + q - l.transpose() * (b.transpose() * pi * b + r) * l;
  return (pi - rhs).norm();
}

Matrix solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                  const FixedPointOptions& options) {
  require_square(a, "A");
  const Eigen::Index n = a.rows();
  require_shape(b, n, b.cols(), "B");
  require_shape(q, n, n, "Q");
  require_shape(r, b.cols(), b.cols(), "R");
  if (!is_psd(q)) throw ModelError("Q must be symmetric positive semi-definite");
  if (!is_pd(r)) throw ModelError("R must be symmetric positive definite");
  if (!is_controllable(a, b)) throw ModelError("(A, B) is not controllable");
  if (!is_observable(a, psd_sqrt(q))) throw ModelError("(A, Q^1/2) is not observable");

  Matrix pi = q;
  double change = INFINITY;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Matrix btpa = b.transpose() * pi * a;
    const Matrix next = symmetrize(a.transpose() * pi * a + q -
                                   btpa.transpose() * guarded_solve(b.transpose() * pi * b + r, btpa));
    change = (next - pi).norm();
    pi = next;
    if (!pi.allFinite()) break;
    if (change < scaled_tolerance(options, pi)) return pi;
  }
  throw SolverError("DARE fixed-point iteration did not converge", change);
}

Matrix riccati_predict(const Matrix& x, const Matrix& a, const Matrix& w) {
  return symmetrize(a * x * a.transpose() + w);
}

Matrix riccati_correct(const Matrix& x, const Matrix& c, const Matrix& v) {
  const Matrix cx = c * x;
  const Matrix innovation = cx * c.transpose() + v;
  return symmetrize(x - cx.transpose() * guarded_solve(innovation, cx));
}

SteadyStateFilter steady_state_covariance(const Matrix& a, const Matrix& c, const Matrix& w,
                                          const Matrix& v, const FixedPointOptions& options) {
  require_square(a, "A");
  const Eigen::Index n = a.rows();
  require_shape(c, c.rows(), n, "C");
  require_shape(w, n, n, "W");
  require_shape(v, c.rows(), c.rows(), "V");
  if (!is_psd(w)) throw ModelError("W must be symmetric positive semi-definite");
  if (!is_psd(v)) throw ModelError("V must be symmetric positive semi-definite");
  if (!is_observable(a, c)) throw ModelError("(A, C) is not observable");
  if (!is_controllable(a, psd_sqrt(w))) throw ModelError("(A, W^1/2) is not controllable");

  Matrix p = w;
  double change = INFINITY;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Matrix next = riccati_correct(riccati_predict(p, a, w), c, v);
    change = (next - p).norm();
    p = next;
    if (!p.allFinite()) break;
    if (change < scaled_tolerance(options, p)) {
      const Matrix prior = riccati_predict(p, a, w);
      const Matrix innovation = c * prior * c.transpose() + v;
      // K' = S^-1 C h(P) since S and h(P) are symmetric.
      Matrix gain = guarded_solve(innovation, c * prior).transpose();
      return {p, std::move(gain)};
    }
  }
  throw SolverError("steady-state covariance iteration did not converge", change);
}

double spectral_radius(const Matrix& a) {
  require_square(a, "spectral_radius argument");
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> eig(a, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

OfflineGains compute_offline_gains(const Matrix& a, const Matrix& b, const Matrix& c,
                                   const Matrix& q, const Matrix& r, const Matrix& w,
                                   const Matrix& v) {
  OfflineGains gains;
  gains.pi_inf = solve_dare(a, b, q, r);
  gains.l_inf = feedback_gain(a, b, r, gains.pi_inf);
  gains.gamma_inf = control_weight(b, r, gains.l_inf, gains.pi_inf);
  auto filter = steady_state_covariance(a, c, w, v);
  gains.p_bar = std::move(filter.p_bar);
  gains.k_steady = std::move(filter.k_steady);
  return gains;
}

GaussianSampler::GaussianSampler(Vector mean, const Matrix& cov) : mean_(std::move(mean)) {
  if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
    throw ModelError("covariance dimension does not match mean");
  }
  if (!is_psd(cov)) throw ModelError("covariance must be symmetric positive semi-definite");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(cov));
  factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector GaussianSampler::sample(RandomStream& rng) const {
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.standard_normal();
  return mean_ + factor_ * z;
}

Vector sample_gaussian(const Vector& mean, const Matrix& cov, RandomStream& rng) {
  return GaussianSampler(mean, cov).sample(rng);
}

}  // namespace wncs
