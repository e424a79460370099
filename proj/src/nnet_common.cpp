#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rsf/errors.hpp"
#include "rsf/nnet.hpp"

namespace rsf {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning rate must be a finite non-negative number");
  }
  if (batch_size < 1) throw ParameterError("batch size must be at least 1");
  if (epochs < 0) throw ParameterError("epoch count must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ParameterError("moment decay rates must lie in [0,1)");
  }
  if (!(adam_eps > 0.0)) throw ParameterError("adam epsilon must be positive");
  if (!(weight_decay >= 0.0)) throw ParameterError("weight decay must be non-negative");
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.size() < 2) throw ParameterError("softmax needs at least two classes");
  for (double z : logits) {
    if (!std::isfinite(z)) throw NumericError("softmax: non-finite logit");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - top);
    total += out[k];
  }
  for (double& p : out) p /= total;
  return out;
}

std::size_t predicted_label(std::span<const double> probabilities) {
  return static_cast<std::size_t>(
      std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

double cross_entropy_loss(const std::vector<std::vector<double>>& probs,
                          std::span<const int> labels) {
  if (probs.empty()) throw ParameterError("cross entropy of an empty batch");
  if (probs.size() != labels.size()) throw ShapeError("probabilities and labels differ in length");
  double loss = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const int k = labels[j];
    if (k < 0 || static_cast<std::size_t>(k) >= probs[j].size()) {
      throw ParameterError("label " + std::to_string(k) + " is not a valid class");
    }
    loss -= std::log(std::max(probs[j][k], 1e-12));
  }
  return loss / static_cast<double>(probs.size());
}

double binary_cross_entropy(std::span<const double> p, std::span<const int> labels) {
  if (p.empty()) throw ParameterError("cross entropy of an empty batch");
  if (p.size() != labels.size()) throw ShapeError("probabilities and labels differ in length");
  double loss = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    loss -= labels[j] == 1 ? std::log(std::max(p[j], 1e-12)) : std::log(std::max(1.0 - p[j], 1e-12));
  }
  return loss / static_cast<double>(p.size());
}

void require_finite(const std::vector<ParamRef>& blocks, const char* what) {
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size; ++i) {
      if (!std::isfinite(b.data[i])) {
        throw NumericError(std::string(what) + ": non-finite value in block '" + b.name + "'");
      }
    }
  }
}

void Adam::step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads) {
  if (params.size() != grads.size()) throw ShapeError("adam: parameter/gradient block mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.size, 0.0);
      v_.emplace_back(p.size, 0.0);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size != grads[b].size || m_[b].size() != params[b].size) {
      throw ShapeError("adam: block '" + params[b].name + "' changed size");
    }
    double* w = params[b].data;
    const double* g = grads[b].data;
    auto& m = m_[b];
    auto& v = v_[b];
    for (std::size_t i = 0; i < params[b].size; ++i) {
      const double gi = g[i] + cfg_.weight_decay * w[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      w[i] -= cfg_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.adam_eps);
    }
  }
}

double gradient_relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size,
                                                   std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(epoch) + 1);
  // Fisher-Yates with explicit draws keeps the order independent of the
  // standard library's shuffle implementation.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(n, start + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace rsf
