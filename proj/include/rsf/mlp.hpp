#pragma once

#include <span>
#include <vector>

#include "rsf/nnet.hpp"

namespace rsf {

struct DenseLayer {
  Matrix weights;  // out × in
  Vector bias;     // out
};

/// Fully connected binary classifier: rectifier hidden layers, logistic
/// output. Inputs are standardized by (x − input_shift) ∘ input_scale first;
/// the identity standardization is the default.
class MlpModel {
 public:
  MlpModel() = default;
  /// Zero-initialized model with the given layer sizes (input … 1).
  explicit MlpModel(const std::vector<int>& sizes);

  static MlpModel initialized(const std::vector<int>& sizes, std::uint64_t seed);

  std::vector<int> sizes() const;
  int input_size() const { return static_cast<int>(input_shift.size()); }

  /// Probability of the positive class for one input.
  double forward(std::span<const double> x) const;
  /// Row vector of probabilities, one per input column.
  Eigen::RowVectorXd forward_batch(const Matrix& inputs) const;

  std::vector<ParamRef> params();
  void validate() const;

  Vector input_shift;
  Vector input_scale;
  std::vector<DenseLayer> layers;
};

inline const std::vector<int> kDefaultMlpSizes = {512, 128, 64, 1};

/// Mean binary cross-entropy over the columns of `inputs`; when `grads` is
/// non-null it receives d(loss)/d(params) with the model's layer shapes.
double mlp_loss_and_gradients(const MlpModel& model, const Matrix& inputs,
                              std::span<const int> labels, MlpModel* grads);

/// Central-difference check of every parameter (input standardization is
/// treated as fixed preprocessing).
GradientCheckResult mlp_gradient_check(const MlpModel& model, const Matrix& inputs,
                                       std::span<const int> labels, double h);

/// Standardization fitted on the training inputs; constant features keep
/// scale 1.
void fit_input_standardization(MlpModel& model, const Matrix& inputs);

/// Mini-batch Adam on binary cross-entropy. Hidden sizes come from `sizes`
/// with sizes.front() overwritten by the data dimension.
MlpModel train_mlp(const LabeledSet& data, const TrainConfig& cfg,
                   std::vector<int> sizes = kDefaultMlpSizes, TrainReport* report = nullptr);

}  // namespace rsf
