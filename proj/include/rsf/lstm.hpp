#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rsf/imaging.hpp"
#include "rsf/nnet.hpp"

namespace rsf {

/// Shape of the patch classifier: conv front-end → block sequence → stacked
/// LSTM → softmax on the last step of the top layer.
struct LstmArch {
  int patch_size = 64;
  int block_size = 8;
  int hidden = 256;
  int layers = 3;
  int conv_filters = 8;
  int classes = 2;

  int blocks_per_side() const { return patch_size / block_size; }
  int steps() const { return blocks_per_side() * blocks_per_side(); }
  int block_dim() const { return block_size * block_size; }
  void validate() const;

  friend bool operator==(const LstmArch&, const LstmArch&) = default;
};

/// 3×3 same-size convolution with zero padding.
struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> weights;  // [out][in][3][3]
  std::vector<double> bias;     // [out]

  double& w(int o, int i, int ky, int kx) { return weights[((o * in_channels + i) * 3 + ky) * 3 + kx]; }
  double w(int o, int i, int ky, int kx) const {
    return weights[((o * in_channels + i) * 3 + ky) * 3 + kx];
  }
};

/// Gate pre-activations z = weights·[h_{t−1}; x_t] + bias, rows ordered as
/// input gate, forget gate, output gate, candidate (4·hidden rows).
struct LstmCellParams {
  Matrix weights;
  Vector bias;

  int hidden() const { return static_cast<int>(bias.size() / 4); }
  int input_size() const { return static_cast<int>(weights.cols()) - hidden(); }
};

class LstmModel {
 public:
  static LstmModel zeros(const LstmArch& arch);
  /// Uniform ±1/sqrt(fan_in) weights, forget-gate bias +1.
  static LstmModel initialized(const LstmArch& arch, std::uint64_t seed);

  std::vector<ParamRef> params();
  void validate() const;

  LstmArch arch;
  ConvLayer conv1;  // 1 → conv_filters, rectifier
  ConvLayer conv2;  // conv_filters → 1, linear
  std::vector<LstmCellParams> cells;
  Matrix softmax_weights;  // classes × hidden
};

/// One LSTM step: returns (h_t, c_t).
std::pair<Vector, Vector> lstm_cell_step(const LstmCellParams& p, const Vector& x,
                                         const Vector& h_prev, const Vector& c_prev);

/// The block sequence the recurrent stack consumes: conv front-end output
/// cut into block_size² blocks, row-major over the block grid.
std::vector<Vector> lstm_front_end(const LstmModel& model, const Plane& patch);

/// Class probabilities for an already-prepared block sequence.
std::vector<double> lstm_forward(const LstmModel& model, const std::vector<Vector>& blocks);

/// Class probabilities for one patch (front-end + recurrent stack).
std::vector<double> lstm_predict(const LstmModel& model, const Plane& patch);

/// Probability of class 1 for every patch.
std::vector<double> lstm_predict_batch(const LstmModel& model, std::span<const Plane> patches);

/// Mean cross-entropy over the batch; when `grads` is non-null it receives the
/// gradient with the model's shapes. Work is split in fixed chunks reduced in
/// order, so the result does not depend on the worker count.
double lstm_loss_and_gradients(const LstmModel& model, std::span<const Plane> patches,
                               std::span<const int> labels, LstmModel* grads);

GradientCheckResult lstm_gradient_check(const LstmModel& model, std::span<const Plane> patches,
                                        std::span<const int> labels, double h);

struct LabeledPatches {
  std::vector<Plane> patches;
  std::vector<int> labels;
};

LstmModel train_lstm_classifier(const LabeledPatches& data, const TrainConfig& cfg,
                                const LstmArch& arch = {}, TrainReport* report = nullptr);

}  // namespace rsf
