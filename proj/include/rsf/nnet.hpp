#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Samples are the columns of `inputs`.
struct LabeledSet {
  Matrix inputs;
  std::vector<int> labels;

  Eigen::Index dim() const { return inputs.rows(); }
  std::size_t size() const { return labels.size(); }
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 30;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;

  void validate() const;
};

struct TrainReport {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;
  double final_loss() const { return epoch_loss.empty() ? initial_loss : epoch_loss.back(); }
};

/// A named, contiguous block of model parameters.
struct ParamRef {
  std::string name;
  double* data = nullptr;
  std::size_t size = 0;
};

inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Numerically stable softmax; throws NumericError on non-finite logits.
std::vector<double> softmax(std::span<const double> logits);
std::size_t predicted_label(std::span<const double> probabilities);

/// Mean negative log-likelihood of the true classes, log argument clamped at
/// 1e-12. `probs` holds one probability vector per sample.
double cross_entropy_loss(const std::vector<std::vector<double>>& probs,
                          std::span<const int> labels);

/// Mean binary cross-entropy for probabilities of the positive class.
double binary_cross_entropy(std::span<const double> p, std::span<const int> labels);

/// Throws NumericError naming the first block holding a non-finite value.
void require_finite(const std::vector<ParamRef>& blocks, const char* what);

class Adam {
 public:
  explicit Adam(const TrainConfig& cfg) : cfg_(cfg) {}

  /// One update; params and grads must have identical block structure.
  void step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads);

 private:
  TrainConfig cfg_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long t_ = 0;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_block;
  std::size_t checked = 0;
};

/// Relative error used by every gradient check: |a−n| / max(|a|, |n|, 1e-6).
double gradient_relative_error(double analytic, double numeric);

/// Splits [0, n) into shuffled mini-batches, deterministic for a seed.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size,
                                                   std::uint64_t seed, int epoch);

}  // namespace rsf
