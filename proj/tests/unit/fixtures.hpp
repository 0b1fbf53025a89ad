#pragma once

#include "wncs/dynamics.hpp"

namespace fixtures {

inline wncs::Matrix scalar(double x) { return wncs::Matrix::Constant(1, 1, x); }

inline wncs::Matrix diag(std::initializer_list<double> entries) {
  wncs::Vector d(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) d(i++) = e;
  return d.asDiagonal();
}

// Scalar loop with b = c = q = 1 unless overridden.
inline wncs::SubsystemModel scalar_model(double a, double w = 0.1, double v = 0.01,
                                         double r = 0.01, double q_link = 1.0) {
  wncs::SubsystemModel m;
  m.a = scalar(a);
  m.b = scalar(1.0);
  m.c = scalar(1.0);
  m.q = scalar(1.0);
  m.r = scalar(r);
  m.w = scalar(w);
  m.v = scalar(v);
  m.x0_mean = wncs::Vector::Zero(1);
  m.x0_cov = scalar(0.1);
  m.q_link = {q_link};
  return m;
}

// Two-state loop with B = C = Q = I, R = V = 0.01 I, W = 0.1 I.
inline wncs::SubsystemModel diagonal_model(double a1, double a2, double q_link, int index = 1) {
  wncs::SubsystemModel m;
  m.index = index;
  m.a = diag({a1, a2});
  m.b = wncs::Matrix::Identity(2, 2);
  m.c = wncs::Matrix::Identity(2, 2);
  m.q = wncs::Matrix::Identity(2, 2);
  m.r = 0.01 * wncs::Matrix::Identity(2, 2);
  m.w = 0.1 * wncs::Matrix::Identity(2, 2);
  m.v = 0.01 * wncs::Matrix::Identity(2, 2);
  m.x0_mean = wncs::Vector::Zero(2);
  m.x0_cov = 0.1 * wncs::Matrix::Identity(2, 2);
  m.q_link = {q_link};
  return m;
}

}  // namespace fixtures
