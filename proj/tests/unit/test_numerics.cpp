#include <doctest.h>

#include <cmath>
#include <random>

#include "wncs/errors.hpp"
#include "wncs/numerics.hpp"

using namespace wncs;

namespace {

// Positive root of the scalar DARE  pi = a^2 pi + q - (a b pi)^2 / (b^2 pi + r).
double scalar_dare(double a, double b, double q, double r) {
  const double bq = r - a * a * r - q * b * b;
  return (-bq + std::sqrt(bq * bq + 4.0 * b * b * q * r)) / (2.0 * b * b);
}

// Positive root of  p = (a^2 p + w) v / (a^2 p + w + v).
double scalar_filter(double a, double w, double v) {
  const double bq = w + v - a * a * v;
  return (-bq + std::sqrt(bq * bq + 4.0 * a * a * w * v)) / (2.0 * a * a);
}

Matrix diag2(double x, double y) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

Matrix random_matrix(std::mt19937_64& gen, int rows, int cols, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = nd(gen);
  return m;
}

Matrix random_pd(std::mt19937_64& gen, int n) {
  Matrix m = random_matrix(gen, n, n, 1.0);
  return m * m.transpose() + 0.1 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("solve_dare: zero dynamics returns Q") {
  const Matrix a = Matrix::Zero(2, 2);
  const Matrix q = diag2(2.0, 3.0);
  // (A, Q^1/2) is observable and (A, B) controllable for A = 0 with B = I.
  const Matrix pi = solve_dare(a, Matrix::Identity(2, 2), q, 0.5 * Matrix::Identity(2, 2));
  CHECK((pi - q).norm() < 1e-12);
}

TEST_CASE("solve_dare: scalar root") {
  const double a = 1.1, b = 1.0, q = 1.0, r = 0.01;
  const Matrix pi = solve_dare(scalar(a), scalar(b), scalar(q), scalar(r));
  const double expected = scalar_dare(a, b, q, r);
  CHECK(pi(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.0119816025653532).epsilon(1e-14));
  CHECK(dare_residual(scalar(a), scalar(b), scalar(q), scalar(r), pi) < 1e-9);
}

TEST_CASE("solve_dare: decoupled two-channel system") {
  const Matrix a = diag2(1.1, 0.9);
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix pi = solve_dare(a, i2, i2, 0.01 * i2);
  CHECK(std::abs(pi(0, 1)) < 1e-14);
  CHECK(std::abs(pi(1, 0)) < 1e-14);
  CHECK(std::abs(pi(0, 0) - scalar_dare(1.1, 1, 1, 0.01)) < 1e-9);
  CHECK(std::abs(pi(1, 1) - scalar_dare(0.9, 1, 1, 0.01)) < 1e-9);

  const Matrix l = feedback_gain(a, i2, 0.01 * i2, pi);
  for (int j = 0; j < 2; ++j) {
    const double aj = a(j, j), pj = pi(j, j);
    const double lj = -(pj * aj) / (pj + 0.01);
    CHECK(std::abs(l(j, j) - lj) < 1e-12);
  }
  CHECK(std::abs(l(0, 1)) < 1e-14);

  const Matrix g = control_weight(i2, 0.01 * i2, l, pi);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(g(j, j) - l(j, j) * l(j, j) * (pi(j, j) + 0.01)) < 1e-12);
  }
  CHECK(g(0, 0) == doctest::Approx(1.2125161365387245).epsilon(1e-12));
  CHECK(g(1, 1) == doctest::Approx(0.8084761175747449).epsilon(1e-12));
}

TEST_CASE("solve_dare: rank failures and bad weights") {
  const Matrix a = diag2(1.1, 0.9);
  const Matrix b(Matrix::Constant(2, 1, 0.0));
  CHECK_THROWS_AS(solve_dare(a, b, Matrix::Identity(2, 2), scalar(1.0)), ModelError);
  CHECK_THROWS_AS(solve_dare(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                             -Matrix::Identity(2, 2)),
                  ModelError);
  // Q = 0 makes (A, Q^1/2) unobservable.
  CHECK_THROWS_AS(solve_dare(a, Matrix::Identity(2, 2), Matrix::Zero(2, 2),
                             Matrix::Identity(2, 2)),
                  ModelError);
}

TEST_CASE("solve_dare: iteration cap reports the residual") {
  FixedPointOptions opts;
  opts.max_iterations = 2;
  try {
    solve_dare(scalar(1.1), scalar(1.0), scalar(1.0), scalar(0.01), opts);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("feedback_gain and control_weight: trivial cases") {
  const Matrix a = diag2(1.1, 0.9);
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix l = feedback_gain(a, i2, i2, Matrix::Zero(2, 2));
  CHECK(l.norm() == 0.0);
  CHECK(control_weight(i2, i2, Matrix::Zero(2, 2), i2).norm() == 0.0);
  // Deadbeat limit as r -> 0.
  const Matrix ld = feedback_gain(scalar(1.0), scalar(1.0), scalar(1e-12), scalar(1.0));
  CHECK(ld(0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("feedback_gain: singular inner matrix") {
  CHECK_THROWS_AS(feedback_gain(scalar(1.0), scalar(1.0), scalar(0.0), scalar(0.0)),
                  NumericError);
}

TEST_CASE("riccati_predict examples") {
  const Matrix a = diag2(1.1, 0.9);
  const Matrix w = 0.1 * Matrix::Identity(2, 2);
  CHECK((riccati_predict(Matrix::Zero(2, 2), a, w) - w).norm() == 0.0);
  const Matrix x = diag2(0.3, 0.7);
  CHECK((riccati_predict(x, Matrix::Identity(2, 2), Matrix::Zero(2, 2)) - x).norm() == 0.0);
  const Matrix h = riccati_predict(Matrix::Identity(2, 2), a, w);
  CHECK((h - diag2(1.31, 0.91)).norm() < 1e-14);
}

TEST_CASE("riccati_correct examples") {
  const Matrix x = diag2(0.3, 0.7);
  CHECK((riccati_correct(x, Matrix::Zero(2, 2), Matrix::Identity(2, 2)) - x).norm() < 1e-15);
  const Matrix g0 = riccati_correct(x, Matrix::Identity(2, 2), 1e-12 * Matrix::Identity(2, 2));
  CHECK(g0.norm() < 1e-9);
  const Matrix g = riccati_correct(scalar(1.0), scalar(1.0), scalar(0.01));
  CHECK(g(0, 0) == doctest::Approx(0.01 / 1.01).epsilon(1e-14));
  CHECK(g(0, 0) == doctest::Approx(0.009901).epsilon(1e-4));
}

TEST_CASE("riccati_correct: singular innovation covariance") {
  CHECK_THROWS_AS(riccati_correct(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2)),
                  NumericError);
}

TEST_CASE("steady_state_covariance examples") {
  SUBCASE("zero dynamics: one-step fixed point") {
    const Matrix w = diag2(0.1, 0.2);
    const Matrix v = 0.01 * Matrix::Identity(2, 2);
    // A = 0 is observable only through C of full rank, which holds here.
    const auto f = steady_state_covariance(Matrix::Zero(2, 2), Matrix::Identity(2, 2), w, v);
    CHECK((f.p_bar - riccati_correct(w, Matrix::Identity(2, 2), v)).norm() < 1e-14);
  }
  SUBCASE("scalar closed form") {
    const auto f = steady_state_covariance(scalar(1.1), scalar(1.0), scalar(0.1), scalar(0.01));
    CHECK(std::abs(f.p_bar(0, 0) - scalar_filter(1.1, 0.1, 0.01)) < 1e-9);
    const double hp = 1.21 * f.p_bar(0, 0) + 0.1;
    CHECK(f.k_steady(0, 0) == doctest::Approx(hp / (hp + 0.01)).epsilon(1e-12));
  }
  SUBCASE("equal diagonal for symmetric channels") {
    const Matrix i2 = Matrix::Identity(2, 2);
    const auto f = steady_state_covariance(diag2(0.9, 0.9), i2, 0.1 * i2, 0.01 * i2);
    CHECK(f.p_bar(0, 0) == doctest::Approx(f.p_bar(1, 1)).epsilon(1e-14));
    CHECK(std::abs(f.p_bar(0, 0) - scalar_filter(0.9, 0.1, 0.01)) < 1e-9);
    CHECK(std::abs(f.p_bar(0, 1)) < 1e-15);
  }
  SUBCASE("unobservable pair rejected") {
    CHECK_THROWS_AS(steady_state_covariance(diag2(1.1, 0.9), Matrix::Zero(1, 2),
                                            0.1 * Matrix::Identity(2, 2), scalar(0.01)),
                    ModelError);
  }
}

TEST_CASE("spectral_radius examples") {
  CHECK(spectral_radius(Matrix::Identity(2, 2)) == doctest::Approx(1.0));
  CHECK(spectral_radius(diag2(1.1, 0.9)) == doctest::Approx(1.1));
  CHECK(spectral_radius(diag2(0.9, 0.9)) == doctest::Approx(0.9));
  Matrix rot(2, 2);
  rot << 0.0, -2.0, 2.0, 0.0;
  CHECK(spectral_radius(rot) == doctest::Approx(2.0));
}

TEST_CASE("validation helpers") {
  CHECK(is_psd(diag2(1.0, 0.0)));
  CHECK_FALSE(is_psd(diag2(1.0, -0.1)));
  CHECK(is_pd(diag2(1.0, 2.0)));
  CHECK_FALSE(is_pd(diag2(1.0, 0.0)));
  Matrix nonsym(2, 2);
  nonsym << 1.0, 2.0, 0.0, 1.0;
  CHECK_FALSE(is_symmetric(nonsym));
  CHECK(is_symmetric(symmetrize(nonsym)));
  const Matrix s = psd_sqrt(diag2(4.0, 9.0));
  CHECK((s - diag2(2.0, 3.0)).norm() < 1e-12);
  CHECK_THROWS_AS(guarded_inverse(diag2(1.0, 1e-14)), NumericError);
}

TEST_CASE("sample_gaussian") {
  SUBCASE("zero covariance returns the mean exactly") {
    RandomStream rng(7);
    Vector mean(2);
    mean << 1.5, -2.0;
    const Vector s = sample_gaussian(mean, Matrix::Zero(2, 2), rng);
    CHECK(s == mean);
  }
  SUBCASE("moments") {
    RandomStream rng(11);
    GaussianSampler sampler(Vector::Zero(2), Matrix::Identity(2, 2));
    const int n = 100000;
    Vector sum = Vector::Zero(2);
    Matrix outer = Matrix::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
      const Vector s = sampler.sample(rng);
      sum += s;
      outer += s * s.transpose();
    }
    const Vector mean = sum / n;
    CHECK(std::abs(mean(0)) < 0.02);
    CHECK(std::abs(mean(1)) < 0.02);
    CHECK(((outer / n) - Matrix::Identity(2, 2)).norm() < 0.03);
  }
  SUBCASE("singular covariance") {
    RandomStream rng(3);
    Matrix cov(2, 2);
    cov << 1.0, 1.0, 1.0, 1.0;
    for (int i = 0; i < 100; ++i) {
      const Vector s = sample_gaussian(Vector::Zero(2), cov, rng);
      CHECK(std::abs(s(0) - s(1)) < 1e-12);
    }
  }
  SUBCASE("determinism") {
    RandomStream r1(42), r2(42);
    for (int i = 0; i < 50; ++i) {
      CHECK(sample_gaussian(Vector::Zero(3), Matrix::Identity(3, 3), r1) ==
            sample_gaussian(Vector::Zero(3), Matrix::Identity(3, 3), r2));
    }
  }
  SUBCASE("non-PSD covariance rejected") {
    RandomStream rng(1);
    CHECK_THROWS_AS(sample_gaussian(Vector::Zero(2), diag2(1.0, -1.0), rng), ModelError);
  }
}

TEST_CASE("random systems: solver residuals and map properties") {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<int> dim(1, 4);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(gen);
    const int m = dim(gen);
    const int p = dim(gen);
    const Matrix a = random_matrix(gen, n, n, 0.6);
    const Matrix b = random_matrix(gen, n, m, 1.0);
    const Matrix c = random_matrix(gen, p, n, 1.0);
    const Matrix q = random_pd(gen, n);
    const Matrix r = random_pd(gen, m);
    const Matrix w = random_pd(gen, n);
    const Matrix v = random_pd(gen, p);
    if (!is_controllable(a, b) || !is_observable(a, c)) continue;
    ++solved;

    const Matrix pi = solve_dare(a, b, q, r);
    CHECK(dare_residual(a, b, q, r, pi) < 1e-9);
    CHECK(is_symmetric(pi));
    CHECK(is_psd(pi));
    const Matrix l = feedback_gain(a, b, r, pi);
    CHECK(spectral_radius(a + b * l) < 1.0);
    CHECK(is_psd(control_weight(b, r, l, pi)));

    const auto f = steady_state_covariance(a, c, w, v);
    CHECK((riccati_correct(riccati_predict(f.p_bar, a, w), c, v) - f.p_bar).norm() < 1e-10);

    // g(X) <= X, symmetry and PSD preservation, monotonicity of g o h.
    const Matrix x = random_pd(gen, n);
    const Matrix d = random_matrix(gen, n, n, 0.5);
    const Matrix y = x + d * d.transpose();
    const Matrix gx = riccati_correct(x, c, v);
    CHECK(min_eigenvalue(symmetrize(x - gx)) >= -1e-10);
    CHECK(min_eigenvalue(gx) >= -1e-10);
    CHECK(is_symmetric(gx, 0.0));
    const Matrix hx = riccati_predict(x, a, w);
    CHECK(min_eigenvalue(hx) >= -1e-10);
    CHECK(is_symmetric(hx, 0.0));
    const Matrix ghx = riccati_correct(hx, c, v);
    const Matrix ghy = riccati_correct(riccati_predict(y, a, w), c, v);
    CHECK(min_eigenvalue(symmetrize(ghy - ghx)) >= -1e-10);
  }
  CHECK(solved >= 90);
}
