#pragma once

#include <span>

#include "rsf/nnet.hpp"

namespace rsf {

/// Gaussian class-conditional (quadratic) classifier for two classes.
struct QdaModel {
  Vector mean[2];
  Matrix covariance[2];  // regularized, symmetric positive definite
  double log_prior[2] = {0.0, 0.0};

  // Cached Cholesky factors and log-determinants, filled by qda_fit.
  Matrix chol_lower[2];
  double log_det[2] = {0.0, 0.0};
};

/// Fits per-class means and covariances with ridge λI, λ = 1e-4·trace/d.
QdaModel qda_fit(const LabeledSet& data);

/// Log posterior odds of class 1 versus class 0.
double qda_score(const QdaModel& model, std::span<const double> x);

/// Log density of N(mean, covariance) at x using the cached factorization.
double qda_log_density(const QdaModel& model, int cls, std::span<const double> x);

}  // namespace rsf
