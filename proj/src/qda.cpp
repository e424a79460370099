#include "rsf/qda.hpp"

#include <cmath>
#include <string>

#include "rsf/errors.hpp"

namespace rsf {

QdaModel qda_fit(const LabeledSet& data) {
  if (static_cast<std::size_t>(data.inputs.cols()) != data.size()) {
    throw ShapeError("dataset inputs and labels differ in count");
  }
  const Eigen::Index d = data.dim();
  QdaModel model;
  std::size_t counts[2] = {0, 0};
  for (int y : data.labels) {
    if (y != 0 && y != 1) throw ParameterError("QDA labels must be 0 or 1");
    ++counts[y];
  }
  for (int c = 0; c < 2; ++c) {
    if (counts[c] < 2) {
      throw ParameterError("QDA needs at least two samples of class " + std::to_string(c));
    }
  }
  for (int c = 0; c < 2; ++c) {
    Vector mean = Vector::Zero(d);
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (data.labels[j] == c) mean += data.inputs.col(static_cast<Eigen::Index>(j));
    }
    mean /= static_cast<double>(counts[c]);
    Matrix cov = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (data.labels[j] != c) continue;
      const Vector diff = data.inputs.col(static_cast<Eigen::Index>(j)) - mean;
      cov.selfadjointView<Eigen::Lower>().rankUpdate(diff);
    }
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(counts[c] - 1);
    double lambda = 1e-4 * cov.trace() / static_cast<double>(d);
    if (!(lambda > 0.0)) lambda = 1e-12;
    cov.diagonal().array() += lambda;

    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NumericError("QDA covariance of class " + std::to_string(c) +
                         " is not positive definite after regularization");
    }
    model.mean[c] = std::move(mean);
    model.chol_lower[c] = llt.matrixL();
    model.log_det[c] = 2.0 * model.chol_lower[c].diagonal().array().log().sum();
    model.covariance[c] = std::move(cov);
    model.log_prior[c] =
        std::log(static_cast<double>(counts[c]) / static_cast<double>(data.size()));
  }
  return model;
}

double qda_log_density(const QdaModel& model, int cls, std::span<const double> x) {
  const auto d = model.mean[cls].size();
  if (static_cast<Eigen::Index>(x.size()) != d) throw ShapeError("QDA input length mismatch");
  const Eigen::Map<const Vector> xv(x.data(), d);
  const Vector z = model.chol_lower[cls].triangularView<Eigen::Lower>().solve(xv - model.mean[cls]);
  return -0.5 * (z.squaredNorm() + model.log_det[cls] +
                 static_cast<double>(d) * std::log(2.0 * M_PI));
}

double qda_score(const QdaModel& model, std::span<const double> x) {
  return qda_log_density(model, 1, x) + model.log_prior[1] - qda_log_density(model, 0, x) -
         model.log_prior[0];
}

}  // namespace rsf
