#include "rsf/lstm.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rsf/errors.hpp"
#include "rsf/parallel.hpp"

namespace rsf {

void LstmArch::validate() const {
  if (patch_size < 1 || block_size < 1 || patch_size % block_size != 0) {
    throw ShapeError("patch size must be a positive multiple of the block size");
  }
  if (hidden < 1 || layers < 1 || conv_filters < 1 || classes < 2) {
    throw ShapeError("invalid LSTM architecture");
  }
}

namespace {

ConvLayer make_conv(int in, int out) {
  return {in, out, std::vector<double>(static_cast<std::size_t>(in) * out * 9, 0.0),
          std::vector<double>(static_cast<std::size_t>(out), 0.0)};
}

}  // namespace

LstmModel LstmModel::zeros(const LstmArch& arch) {
  arch.validate();
  LstmModel m;
  m.arch = arch;
  m.conv1 = make_conv(1, arch.conv_filters);
  m.conv2 = make_conv(arch.conv_filters, 1);
  for (int l = 0; l < arch.layers; ++l) {
    const int in = l == 0 ? arch.block_dim() : arch.hidden;
    m.cells.push_back({Matrix::Zero(4 * arch.hidden, arch.hidden + in), Vector::Zero(4 * arch.hidden)});
  }
  m.softmax_weights = Matrix::Zero(arch.classes, arch.hidden);
  return m;
}

LstmModel LstmModel::initialized(const LstmArch& arch, std::uint64_t seed) {
  LstmModel m = zeros(arch);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](double* data, std::size_t n, double limit) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < n; ++i) data[i] = dist(rng);
  };
  // Rectifier layer uses He scaling; the rest 1/sqrt(fan_in).
  fill(m.conv1.weights.data(), m.conv1.weights.size(), std::sqrt(6.0 / 9.0));
  fill(m.conv2.weights.data(), m.conv2.weights.size(), 1.0 / std::sqrt(9.0 * arch.conv_filters));
  for (auto& cell : m.cells) {
    fill(cell.weights.data(), static_cast<std::size_t>(cell.weights.size()),
         1.0 / std::sqrt(static_cast<double>(cell.weights.cols())));
    cell.bias.segment(arch.hidden, arch.hidden).setOnes();
  }
  fill(m.softmax_weights.data(), static_cast<std::size_t>(m.softmax_weights.size()),
       1.0 / std::sqrt(static_cast<double>(arch.hidden)));
  return m;
}

std::vector<ParamRef> LstmModel::params() {
  std::vector<ParamRef> out;
  out.push_back({"conv1.weights", conv1.weights.data(), conv1.weights.size()});
  out.push_back({"conv1.bias", conv1.bias.data(), conv1.bias.size()});
  out.push_back({"conv2.weights", conv2.weights.data(), conv2.weights.size()});
  out.push_back({"conv2.bias", conv2.bias.data(), conv2.bias.size()});
  for (std::size_t l = 0; l < cells.size(); ++l) {
    const std::string tag = "lstm" + std::to_string(l);
    out.push_back({tag + ".weights", cells[l].weights.data(),
                   static_cast<std::size_t>(cells[l].weights.size())});
    out.push_back({tag + ".bias", cells[l].bias.data(), static_cast<std::size_t>(cells[l].bias.size())});
  }
  out.push_back({"softmax.weights", softmax_weights.data(),
                 static_cast<std::size_t>(softmax_weights.size())});
  return out;
}

void LstmModel::validate() const {
  arch.validate();
  const int f = arch.conv_filters;
  if (conv1.in_channels != 1 || conv1.out_channels != f || conv1.weights.size() != 9u * f ||
      conv1.bias.size() != static_cast<std::size_t>(f) || conv2.in_channels != f ||
      conv2.out_channels != 1 || conv2.weights.size() != 9u * f || conv2.bias.size() != 1) {
    throw ShapeError("LSTM front-end shapes do not match the architecture");
  }
  if (static_cast<int>(cells.size()) != arch.layers) throw ShapeError("wrong number of LSTM layers");
  for (int l = 0; l < arch.layers; ++l) {
    const int in = l == 0 ? arch.block_dim() : arch.hidden;
    if (cells[l].weights.rows() != 4 * arch.hidden || cells[l].weights.cols() != arch.hidden + in ||
        cells[l].bias.size() != 4 * arch.hidden) {
      throw ShapeError("LSTM layer " + std::to_string(l) + " has inconsistent shapes");
    }
  }
  if (softmax_weights.rows() != arch.classes || softmax_weights.cols() != arch.hidden) {
    throw ShapeError("softmax input dimension must equal the hidden size");
  }
}

std::pair<Vector, Vector> lstm_cell_step(const LstmCellParams& p, const Vector& x,
                                         const Vector& h_prev, const Vector& c_prev) {
  const int hdim = p.hidden();
  if (p.weights.rows() != 4 * hdim || h_prev.size() != hdim || c_prev.size() != hdim ||
      x.size() != p.input_size()) {
    throw ShapeError("lstm_cell_step: shape mismatch");
  }
  const Vector z = p.weights.leftCols(hdim) * h_prev + p.weights.rightCols(x.size()) * x + p.bias;
  Vector c(hdim);
  Vector h(hdim);
  for (int k = 0; k < hdim; ++k) {
    const double i = logistic(z(k));
    const double f = logistic(z(hdim + k));
    const double o = logistic(z(2 * hdim + k));
    const double g = std::tanh(z(3 * hdim + k));
    c(k) = f * c_prev(k) + i * g;
    h(k) = o * std::tanh(c(k));
  }
  return {h, c};
}

namespace {

// ---------------------------------------------------------------------------
// Convolution front-end

// in: channels × p × p planes, out: conv.out_channels planes. Zero padding.
void conv_forward(const ConvLayer& conv, const double* in, double* out, int p) {
  const std::size_t plane = static_cast<std::size_t>(p) * p;
  for (int o = 0; o < conv.out_channels; ++o) {
    double* dst = out + o * plane;
    for (std::size_t k = 0; k < plane; ++k) dst[k] = conv.bias[o];
    for (int i = 0; i < conv.in_channels; ++i) {
      const double* src = in + i * plane;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double w = conv.w(o, i, ky, kx);
          const int dy = ky - 1;
          const int dx = kx - 1;
          const int y0 = std::max(0, -dy);
          const int y1 = std::min(p, p - dy);
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(p, p - dx);
          for (int y = y0; y < y1; ++y) {
            double* drow = dst + static_cast<std::size_t>(y) * p;
            const double* srow = src + static_cast<std::size_t>(y + dy) * p + dx;
            for (int x = x0; x < x1; ++x) drow[x] += w * srow[x];
          }
        }
      }
    }
  }
}

// Accumulates dW, dB into grad and, when d_in is non-null, writes dL/d(in).
void conv_backward(const ConvLayer& conv, const double* in, const double* d_out, int p,
                   ConvLayer& grad, double* d_in) {
  const std::size_t plane = static_cast<std::size_t>(p) * p;
  if (d_in) std::fill(d_in, d_in + plane * conv.in_channels, 0.0);
  for (int o = 0; o < conv.out_channels; ++o) {
    const double* g = d_out + o * plane;
    double bsum = 0.0;
    for (std::size_t k = 0; k < plane; ++k) bsum += g[k];
    grad.bias[o] += bsum;
    for (int i = 0; i < conv.in_channels; ++i) {
      const double* src = in + i * plane;
      double* dsrc = d_in ? d_in + i * plane : nullptr;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double w = conv.w(o, i, ky, kx);
          const int dy = ky - 1;
          const int dx = kx - 1;
          const int y0 = std::max(0, -dy);
          const int y1 = std::min(p, p - dy);
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(p, p - dx);
          double acc = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* grow = g + static_cast<std::size_t>(y) * p;
            const std::size_t off = static_cast<std::size_t>(y + dy) * p + dx;
            const double* srow = src + off;
            for (int x = x0; x < x1; ++x) acc += grow[x] * srow[x];
            if (dsrc) {
              double* drow = dsrc + off;
              for (int x = x0; x < x1; ++x) drow[x] += w * grow[x];
            }
          }
          grad.w(o, i, ky, kx) += acc;
        }
      }
    }
  }
}

struct FrontEndCache {
  std::vector<double> input;   // p × p
  std::vector<double> pre1;    // F × p × p (pre-activation)
  std::vector<double> act1;    // F × p × p
  std::vector<double> output;  // p × p
};

FrontEndCache front_end(const LstmModel& m, const Plane& patch) {
  const int p = m.arch.patch_size;
  if (patch.width() != p || patch.height() != p) {
    throw ShapeError("LSTM classifier expects " + std::to_string(p) + "x" + std::to_string(p) +
                     " patches, got " + std::to_string(patch.width()) + "x" +
                     std::to_string(patch.height()));
  }
  const std::size_t plane = static_cast<std::size_t>(p) * p;
  FrontEndCache c;
  c.input.assign(patch.samples().begin(), patch.samples().end());
  c.pre1.resize(plane * m.arch.conv_filters);
  conv_forward(m.conv1, c.input.data(), c.pre1.data(), p);
  c.act1.resize(c.pre1.size());
  for (std::size_t k = 0; k < c.pre1.size(); ++k) c.act1[k] = std::max(0.0, c.pre1[k]);
  c.output.resize(plane);
  conv_forward(m.conv2, c.act1.data(), c.output.data(), p);
  return c;
}

// Writes the block sequence of one sample into columns t·k + j of `u`.
void scatter_blocks(const LstmArch& a, const std::vector<double>& map, Matrix& u, int k, int j) {
  const int g = a.blocks_per_side();
  const int b = a.block_size;
  const int p = a.patch_size;
  for (int t = 0; t < a.steps(); ++t) {
    const int by = (t / g) * b;
    const int bx = (t % g) * b;
    auto col = u.col(static_cast<Eigen::Index>(t) * k + j);
    for (int y = 0; y < b; ++y) {
      for (int x = 0; x < b; ++x) col(y * b + x) = map[static_cast<std::size_t>(by + y) * p + bx + x];
    }
  }
}

void gather_blocks(const LstmArch& a, const Matrix& du, int k, int j, std::vector<double>& map) {
  const int g = a.blocks_per_side();
  const int b = a.block_size;
  const int p = a.patch_size;
  for (int t = 0; t < a.steps(); ++t) {
    const int by = (t / g) * b;
    const int bx = (t % g) * b;
    const auto col = du.col(static_cast<Eigen::Index>(t) * k + j);
    for (int y = 0; y < b; ++y) {
      for (int x = 0; x < b; ++x) map[static_cast<std::size_t>(by + y) * p + bx + x] = col(y * b + x);
    }
  }
}

// ---------------------------------------------------------------------------
// Recurrent stack over a chunk of k samples. Column t·k + j holds step t of
// sample j.

struct LayerCache {
  Matrix input;  // in × T·k
  Matrix gates;  // 4H × T·k, activated (i, f, o, g)
  Matrix cells;  // H × T·k
  Matrix hidden; // H × T·k
};

void layer_forward(const LstmCellParams& p, const Matrix& input, int steps, int k,
                   LayerCache& cache) {
  const int hdim = p.hidden();
  const Eigen::Index in = input.rows();
  cache.input = input;
  cache.gates.noalias() = p.weights.rightCols(in) * input;
  cache.gates.colwise() += p.bias;
  cache.cells.resize(hdim, input.cols());
  cache.hidden.resize(hdim, input.cols());
  Matrix h_prev = Matrix::Zero(hdim, k);
  Matrix c_prev = Matrix::Zero(hdim, k);
  const auto wh = p.weights.leftCols(hdim);
  for (int t = 0; t < steps; ++t) {
    auto z = cache.gates.middleCols(static_cast<Eigen::Index>(t) * k, k);
    if (t > 0) z.noalias() += wh * h_prev;
    for (int j = 0; j < k; ++j) {
      for (int r = 0; r < hdim; ++r) {
        const double i = logistic(z(r, j));
        const double f = logistic(z(hdim + r, j));
        const double o = logistic(z(2 * hdim + r, j));
        const double g = std::tanh(z(3 * hdim + r, j));
        z(r, j) = i;
        z(hdim + r, j) = f;
        z(2 * hdim + r, j) = o;
        z(3 * hdim + r, j) = g;
        const double c = f * c_prev(r, j) + i * g;
        c_prev(r, j) = c;
        h_prev(r, j) = o * std::tanh(c);
      }
    }
    cache.cells.middleCols(static_cast<Eigen::Index>(t) * k, k) = c_prev;
    cache.hidden.middleCols(static_cast<Eigen::Index>(t) * k, k) = h_prev;
  }
}

// d_hidden: dL/dh_t arriving from above (H × T·k). Returns dL/d(input).
Matrix layer_backward(const LstmCellParams& p, const LayerCache& cache, const Matrix& d_hidden,
                      int steps, int k, LstmCellParams& grad) {
  const int hdim = p.hidden();
  const Eigen::Index in = cache.input.rows();
  Matrix dz(4 * hdim, cache.input.cols());
  Matrix dh_next = Matrix::Zero(hdim, k);
  Matrix dc_next = Matrix::Zero(hdim, k);
  const auto wh = p.weights.leftCols(hdim);
  for (int t = steps - 1; t >= 0; --t) {
    const Eigen::Index off = static_cast<Eigen::Index>(t) * k;
    Matrix dh = d_hidden.middleCols(off, k) + dh_next;
    for (int j = 0; j < k; ++j) {
      for (int r = 0; r < hdim; ++r) {
        const double i = cache.gates(r, off + j);
        const double f = cache.gates(hdim + r, off + j);
        const double o = cache.gates(2 * hdim + r, off + j);
        const double g = cache.gates(3 * hdim + r, off + j);
        const double c = cache.cells(r, off + j);
        const double c_prev = t > 0 ? cache.cells(r, off - k + j) : 0.0;
        const double tc = std::tanh(c);
        const double dc = dc_next(r, j) + dh(r, j) * o * (1.0 - tc * tc);
        dz(r, off + j) = dc * g * i * (1.0 - i);
        dz(hdim + r, off + j) = dc * c_prev * f * (1.0 - f);
        dz(2 * hdim + r, off + j) = dh(r, j) * tc * o * (1.0 - o);
        dz(3 * hdim + r, off + j) = dc * i * (1.0 - g * g);
        dc_next(r, j) = dc * f;
      }
    }
    if (t > 0) dh_next.noalias() = wh.transpose() * dz.middleCols(off, k);
  }
  grad.weights.rightCols(in).noalias() += dz * cache.input.transpose();
  if (steps > 1) {
    const Eigen::Index rest = static_cast<Eigen::Index>(steps - 1) * k;
    grad.weights.leftCols(hdim).noalias() +=
        dz.rightCols(rest) * cache.hidden.leftCols(rest).transpose();
  }
  grad.bias.noalias() += dz.rowwise().sum();
  return p.weights.rightCols(in).transpose() * dz;
}

// Loss summed (not averaged) over the chunk; gradients of that sum scaled by
// `scale` are accumulated into grad when non-null.
double chunk_loss(const LstmModel& m, std::span<const Plane> patches, std::span<const int> labels,
                  double scale, LstmModel* grad, std::vector<double>* probs_out) {
  const LstmArch& a = m.arch;
  const int k = static_cast<int>(patches.size());
  const int steps = a.steps();
  std::vector<FrontEndCache> fe(k);
  Matrix u(a.block_dim(), static_cast<Eigen::Index>(steps) * k);
  for (int j = 0; j < k; ++j) {
    fe[j] = front_end(m, patches[j]);
    scatter_blocks(a, fe[j].output, u, k, j);
  }
  std::vector<LayerCache> caches(a.layers);
  for (int l = 0; l < a.layers; ++l) {
    layer_forward(m.cells[l], l == 0 ? u : caches[l - 1].hidden, steps, k, caches[l]);
  }
  const Eigen::Index last = static_cast<Eigen::Index>(steps - 1) * k;
  const Matrix features = caches.back().hidden.middleCols(last, k);
  const Matrix logits = m.softmax_weights * features;

  double loss = 0.0;
  Matrix dlogits(a.classes, k);
  for (int j = 0; j < k; ++j) {
    const std::vector<double> z(logits.col(j).data(), logits.col(j).data() + a.classes);
    const std::vector<double> prob = softmax(z);
    if (probs_out) probs_out->push_back(prob[1]);
    if (labels.empty()) continue;
    const int y = labels[j];
    if (y < 0 || y >= a.classes) throw ParameterError("invalid class label " + std::to_string(y));
    loss -= std::log(std::max(prob[y], 1e-12));
    for (int c = 0; c < a.classes; ++c) dlogits(c, j) = scale * (prob[c] - (c == y ? 1.0 : 0.0));
  }
  if (!grad) return loss;

  grad->softmax_weights.noalias() += dlogits * features.transpose();
  Matrix d_hidden = Matrix::Zero(a.hidden, static_cast<Eigen::Index>(steps) * k);
  d_hidden.middleCols(last, k) = m.softmax_weights.transpose() * dlogits;
  for (int l = a.layers - 1; l >= 0; --l) {
    d_hidden = layer_backward(m.cells[l], caches[l], d_hidden, steps, k, grad->cells[l]);
  }
  const int p = a.patch_size;
  const std::size_t plane = static_cast<std::size_t>(p) * p;
  std::vector<double> d_map(plane);
  std::vector<double> d_act1(plane * a.conv_filters);
  for (int j = 0; j < k; ++j) {
    gather_blocks(a, d_hidden, k, j, d_map);
    conv_backward(m.conv2, fe[j].act1.data(), d_map.data(), p, grad->conv2, d_act1.data());
    for (std::size_t q = 0; q < d_act1.size(); ++q) {
      if (fe[j].pre1[q] <= 0.0) d_act1[q] = 0.0;
    }
    conv_backward(m.conv1, fe[j].input.data(), d_act1.data(), p, grad->conv1, nullptr);
  }
  return loss;
}

constexpr std::size_t kChunk = 16;

void add_into(LstmModel& dst, LstmModel& src) {
  auto d = dst.params();
  auto s = src.params();
  for (std::size_t b = 0; b < d.size(); ++b) {
    for (std::size_t i = 0; i < d[b].size; ++i) d[b].data[i] += s[b].data[i];
  }
}

}  // namespace

std::vector<Vector> lstm_front_end(const LstmModel& model, const Plane& patch) {
  const FrontEndCache c = front_end(model, patch);
  const LstmArch& a = model.arch;
  Matrix u(a.block_dim(), a.steps());
  scatter_blocks(a, c.output, u, 1, 0);
  std::vector<Vector> blocks;
  for (int t = 0; t < a.steps(); ++t) blocks.emplace_back(u.col(t));
  return blocks;
}

std::vector<double> lstm_forward(const LstmModel& model, const std::vector<Vector>& blocks) {
  const LstmArch& a = model.arch;
  if (static_cast<int>(blocks.size()) != a.steps()) {
    throw ShapeError("LSTM expects a sequence of " + std::to_string(a.steps()) + " blocks, got " +
                     std::to_string(blocks.size()));
  }
  std::vector<Vector> seq = blocks;
  for (const auto& b : seq) {
    if (b.size() != a.block_dim()) throw ShapeError("LSTM block has the wrong length");
  }
  for (const auto& cell : model.cells) {
    Vector h = Vector::Zero(a.hidden);
    Vector c = Vector::Zero(a.hidden);
    for (auto& x : seq) {
      std::tie(h, c) = lstm_cell_step(cell, x, h, c);
      x = h;
    }
  }
  const Vector logits = model.softmax_weights * seq.back();
  return softmax(std::vector<double>(logits.data(), logits.data() + logits.size()));
}

std::vector<double> lstm_predict(const LstmModel& model, const Plane& patch) {
  return lstm_forward(model, lstm_front_end(model, patch));
}

std::vector<double> lstm_predict_batch(const LstmModel& model, std::span<const Plane> patches) {
  const std::size_t chunks = (patches.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t start = c * kChunk;
    const std::size_t len = std::min(kChunk, patches.size() - start);
    chunk_loss(model, patches.subspan(start, len), {}, 0.0, nullptr, &parts[c]);
  });
  std::vector<double> out;
  out.reserve(patches.size());
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

double lstm_loss_and_gradients(const LstmModel& model, std::span<const Plane> patches,
                               std::span<const int> labels, LstmModel* grads) {
  if (patches.empty()) throw ParameterError("cross entropy of an empty batch");
  if (patches.size() != labels.size()) throw ShapeError("patches and labels differ in count");
  const double scale = 1.0 / static_cast<double>(patches.size());
  const std::size_t chunks = (patches.size() + kChunk - 1) / kChunk;
  std::vector<double> losses(chunks, 0.0);
  std::vector<LstmModel> partial;
  if (grads) partial.assign(chunks, LstmModel::zeros(model.arch));
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t start = c * kChunk;
    const std::size_t len = std::min(kChunk, patches.size() - start);
    losses[c] = chunk_loss(model, patches.subspan(start, len), labels.subspan(start, len), scale,
                           grads ? &partial[c] : nullptr, nullptr);
  });
  double loss = 0.0;
  for (double l : losses) loss += l;
  if (grads) {
    *grads = std::move(partial[0]);
    for (std::size_t c = 1; c < chunks; ++c) add_into(*grads, partial[c]);
    require_finite(grads->params(), "lstm gradients");
  }
  return loss * scale;
}

GradientCheckResult lstm_gradient_check(const LstmModel& model, std::span<const Plane> patches,
                                        std::span<const int> labels, double h) {
  LstmModel analytic;
  lstm_loss_and_gradients(model, patches, labels, &analytic);
  LstmModel probe = model;
  const auto params = probe.params();
  const auto grads = analytic.params();
  GradientCheckResult result;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size; ++i) {
      const double saved = params[b].data[i];
      params[b].data[i] = saved + h;
      const double up = lstm_loss_and_gradients(probe, patches, labels, nullptr);
      params[b].data[i] = saved - h;
      const double down = lstm_loss_and_gradients(probe, patches, labels, nullptr);
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

LstmModel train_lstm_classifier(const LabeledPatches& data, const TrainConfig& cfg,
                                const LstmArch& arch, TrainReport* report) {
  cfg.validate();
  arch.validate();
  if (data.patches.empty()) throw TrainingError("cannot train on an empty dataset");
  if (data.patches.size() != data.labels.size()) {
    throw ShapeError("patches and labels differ in count");
  }
  std::vector<bool> seen(arch.classes, false);
  for (int y : data.labels) {
    if (y < 0 || y >= arch.classes) throw TrainingError("label outside the class range");
    seen[y] = true;
  }
  for (bool s : seen) {
    if (!s) throw TrainingError("training data must contain every class");
  }

  LstmModel model = LstmModel::initialized(arch, cfg.seed);
  TrainReport local;
  local.initial_loss = lstm_loss_and_gradients(model, data.patches, data.labels, nullptr);
  Adam adam(cfg);
  LstmModel grads;
  std::vector<Plane> xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double total = 0.0;
    for (const auto& batch : make_batches(data.patches.size(), cfg.batch_size, cfg.seed, epoch)) {
      xb.clear();
      yb.clear();
      for (std::size_t idx : batch) {
        xb.push_back(data.patches[idx]);
        yb.push_back(data.labels[idx]);
      }
      total += lstm_loss_and_gradients(model, xb, yb, &grads) * static_cast<double>(batch.size());
      adam.step(model.params(), grads.params());
    }
    local.epoch_loss.push_back(total / static_cast<double>(data.patches.size()));
  }
  require_finite(model.params(), "train_lstm_classifier");
  if (report) *report = std::move(local);
  return model;
}

}  // namespace rsf
