#include "rsf/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rsf/errors.hpp"

namespace rsf {

MlpModel::MlpModel(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ShapeError("an MLP needs at least an input and an output layer");
  for (int s : sizes) {
    if (s < 1) throw ShapeError("layer sizes must be positive");
  }
  if (sizes.back() != 1) throw ShapeError("the output layer of a binary MLP has one unit");
  input_shift = Vector::Zero(sizes.front());
  input_scale = Vector::Ones(sizes.front());
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    layers.push_back({Matrix::Zero(sizes[l], sizes[l - 1]), Vector::Zero(sizes[l])});
  }
}

MlpModel MlpModel::initialized(const std::vector<int>& sizes, std::uint64_t seed) {
  MlpModel model(sizes);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& w = model.layers[l].weights;
    const bool hidden = l + 1 < model.layers.size();
    // He-uniform for rectifier layers, LeCun-uniform for the logistic output.
    const double limit = std::sqrt((hidden ? 6.0 : 3.0) / static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
    }
  }
  return model;
}

std::vector<int> MlpModel::sizes() const {
  std::vector<int> s{input_size()};
  for (const auto& l : layers) s.push_back(static_cast<int>(l.bias.size()));
  return s;
}

void MlpModel::validate() const {
  if (layers.empty()) throw ShapeError("MLP has no layers");
  Eigen::Index prev = input_shift.size();
  if (input_scale.size() != prev) throw ShapeError("input standardization sizes disagree");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weights.cols() != prev || layers[l].weights.rows() != layers[l].bias.size()) {
      throw ShapeError("MLP layer " + std::to_string(l) + " has inconsistent dimensions");
    }
    prev = layers[l].weights.rows();
  }
  if (prev != 1) throw ShapeError("MLP output layer must have one unit");
}

std::vector<ParamRef> MlpModel::params() {
  std::vector<ParamRef> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string tag = "layer" + std::to_string(l);
    out.push_back({tag + ".weights", layers[l].weights.data(),
                   static_cast<std::size_t>(layers[l].weights.size())});
    out.push_back({tag + ".bias", layers[l].bias.data(),
                   static_cast<std::size_t>(layers[l].bias.size())});
  }
  return out;
}

namespace {

Matrix standardize(const MlpModel& model, const Matrix& inputs) {
  if (inputs.rows() != model.input_shift.size()) {
    throw ShapeError("MLP expects inputs of length " + std::to_string(model.input_shift.size()) +
                     ", got " + std::to_string(inputs.rows()));
  }
  return (inputs.colwise() - model.input_shift).array().colwise() * model.input_scale.array();
}

struct ForwardCache {
  std::vector<Matrix> activations;  // a_0 … a_{L-1}
  std::vector<Matrix> preacts;      // z_1 … z_L
};

Eigen::RowVectorXd run_forward(const MlpModel& model, const Matrix& inputs, ForwardCache* cache) {
  Matrix a = standardize(model, inputs);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Matrix z = model.layers[l].weights * a;
    z.colwise() += model.layers[l].bias;
    if (cache) {
      cache->activations.push_back(a);
      cache->preacts.push_back(z);
    }
    if (l + 1 < model.layers.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = z.unaryExpr([](double v) { return logistic(v); });
    }
  }
  return a.row(0);
}

}  // namespace

double MlpModel::forward(std::span<const double> x) const {
  Matrix col(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) col(static_cast<Eigen::Index>(i), 0) = x[i];
  return run_forward(*this, col, nullptr)(0);
}

Eigen::RowVectorXd MlpModel::forward_batch(const Matrix& inputs) const {
  return run_forward(*this, inputs, nullptr);
}

double mlp_loss_and_gradients(const MlpModel& model, const Matrix& inputs,
                              std::span<const int> labels, MlpModel* grads) {
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) {
    throw ShapeError("input columns and labels differ in count");
  }
  ForwardCache cache;
  const Eigen::RowVectorXd p = run_forward(model, inputs, grads ? &cache : nullptr);
  const std::vector<double> pv(p.data(), p.data() + p.size());
  const double loss = binary_cross_entropy(pv, labels);
  if (!grads) return loss;

  const auto batch = static_cast<double>(labels.size());
  *grads = model;
  Matrix dz(1, p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) dz(0, j) = (p(j) - labels[j]) / batch;
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    grads->layers[l].weights = dz * cache.activations[l].transpose();
    grads->layers[l].bias = dz.rowwise().sum();
    if (l == 0) break;
    Matrix da = model.layers[l].weights.transpose() * dz;
    dz = da.array() * (cache.preacts[l - 1].array() > 0.0).cast<double>();
  }
  require_finite(grads->params(), "mlp gradients");
  return loss;
}

GradientCheckResult mlp_gradient_check(const MlpModel& model, const Matrix& inputs,
                                       std::span<const int> labels, double h) {
  MlpModel analytic;
  mlp_loss_and_gradients(model, inputs, labels, &analytic);
  MlpModel probe = model;
  const auto params = probe.params();
  const auto grads = analytic.params();
  GradientCheckResult result;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size; ++i) {
      const double saved = params[b].data[i];
      params[b].data[i] = saved + h;
      const double up = mlp_loss_and_gradients(probe, inputs, labels, nullptr);
      params[b].data[i] = saved - h;
      const double down = mlp_loss_and_gradients(probe, inputs, labels, nullptr);
      params[b].data[i] = saved;
      const double err = gradient_relative_error(grads[b].data[i], (up - down) / (2.0 * h));
      ++result.checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_block = params[b].name;
      }
    }
  }
  return result;
}

void fit_input_standardization(MlpModel& model, const Matrix& inputs) {
  if (inputs.rows() != model.input_shift.size()) throw ShapeError("standardization size mismatch");
  if (inputs.cols() == 0) return;
  const Vector mean = inputs.rowwise().mean();
  const Vector var = (inputs.colwise() - mean).array().square().rowwise().mean();
  model.input_shift = mean;
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    model.input_scale(i) = var(i) > 1e-24 ? 1.0 / std::sqrt(var(i)) : 1.0;
  }
}

MlpModel train_mlp(const LabeledSet& data, const TrainConfig& cfg, std::vector<int> sizes,
                   TrainReport* report) {
  cfg.validate();
  if (data.size() == 0) throw TrainingError("cannot train on an empty dataset");
  if (static_cast<std::size_t>(data.inputs.cols()) != data.size()) {
    throw ShapeError("dataset inputs and labels differ in count");
  }
  bool has0 = false;
  bool has1 = false;
  for (int y : data.labels) {
    if (y != 0 && y != 1) throw TrainingError("binary labels must be 0 or 1");
    (y == 0 ? has0 : has1) = true;
  }
  if (!has0 || !has1) throw TrainingError("training data must contain both classes");

  sizes.front() = static_cast<int>(data.dim());
  MlpModel model = MlpModel::initialized(sizes, cfg.seed);
  fit_input_standardization(model, data.inputs);

  TrainReport local;
  local.initial_loss = mlp_loss_and_gradients(model, data.inputs, data.labels, nullptr);
  Adam adam(cfg);
  MlpModel grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double total = 0.0;
    for (const auto& batch : make_batches(data.size(), cfg.batch_size, cfg.seed, epoch)) {
      Matrix x(data.dim(), static_cast<Eigen::Index>(batch.size()));
      std::vector<int> y(batch.size());
      for (std::size_t j = 0; j < batch.size(); ++j) {
        x.col(static_cast<Eigen::Index>(j)) = data.inputs.col(static_cast<Eigen::Index>(batch[j]));
        y[j] = data.labels[batch[j]];
      }
      total += mlp_loss_and_gradients(model, x, y, &grads) * static_cast<double>(batch.size());
      adam.step(model.params(), grads.params());
    }
    local.epoch_loss.push_back(total / static_cast<double>(data.size()));
  }
  require_finite(model.params(), "train_mlp");
  if (report) *report = std::move(local);
  return model;
}

}  // namespace rsf
