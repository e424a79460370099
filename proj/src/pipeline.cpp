#include "rsf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsf/errors.hpp"
#include "rsf/parallel.hpp"

namespace rsf {

void DetectConfig::validate() const {
  if (patch_size < 8) throw ParameterError("patch size must be at least 8");
  if (stride < 1) throw ParameterError("stride must be positive");
  if (angles < 1) throw ParameterError("angle count must be positive");
  if (!(sigma_s > 0.0) || !(sigma_r > 0.0)) throw ParameterError("bilateral sigmas must be positive");
  if (!(walker.beta > 0.0)) throw ParameterError("random walker beta must be positive");
  if (!(select.eta_min >= 0.0 && select.eta_min <= 1.0)) throw ParameterError("eta_min must lie in [0,1]");
  if (!(select.mass_min >= 0.0 && select.mass_min <= 0.5)) {
    throw ParameterError("mass_min must lie in [0,0.5]");
  }
  if (!(select.mode_min >= 0.0 && select.mode_min <= 1.0)) throw ParameterError("mode_min must lie in [0,1]");
  if (histogram_bins < 2) throw ParameterError("histogram needs at least two bins");
}

std::vector<Channel> DetectionResult::selected_channels() const {
  std::vector<Channel> out;
  for (int c = 0; c < kChannelCount; ++c) {
    if (channels[c].selected) out.push_back(static_cast<Channel>(c));
  }
  return out;
}

HeatmapStack compute_heatmaps(const ImageBuffer& img, std::span<const MlpModel> models,
                              const DetectConfig& cfg) {
  cfg.validate();
  if (models.size() != kChannelCount) {
    throw ParameterError("detection needs exactly " + std::to_string(kChannelCount) + " models");
  }
  const RadonConfig radon = RadonConfig::for_patch(cfg.patch_size, cfg.angles);
  for (const auto& m : models) {
    if (m.input_size() != radon.feature_length()) {
      throw ShapeError("model input size " + std::to_string(m.input_size()) +
                       " does not match feature length " + std::to_string(radon.feature_length()));
    }
  }
  HeatmapStack stack;
  stack.grid = PatchGrid::for_image(img.width(), img.height(), cfg.patch_size, cfg.stride);
  const auto features = radon_features_for_grid(img, stack.grid, radon);
  Matrix x(radon.feature_length(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Vector>(features[i].values.data(), radon.feature_length());
  }
  for (int c = 0; c < kChannelCount; ++c) {
    const Eigen::RowVectorXd p = models[c].forward_batch(x);
    Plane ch(stack.grid.cols, stack.grid.rows);
    for (Eigen::Index i = 0; i < p.size(); ++i) ch[static_cast<std::size_t>(i)] = p[i];
    stack.channels[c] = clamp_unit(std::move(ch));
  }
  return stack;
}

Plane upsample_to_pixels(const Plane& grid_map, const PatchGrid& grid, int width, int height) {
  if (grid_map.width() != grid.cols || grid_map.height() != grid.rows) {
    throw ShapeError("grid map does not match the patch grid");
  }
  Plane out(width, height);
  const double half = grid.patch_size / 2.0;
  for (int y = 0; y < height; ++y) {
    const double gy = std::clamp((y + 0.5 - half) / grid.stride, 0.0, grid.rows - 1.0);
    for (int x = 0; x < width; ++x) {
      const double gx = std::clamp((x + 0.5 - half) / grid.stride, 0.0, grid.cols - 1.0);
      out.at(x, y) = sample_bilinear(grid_map, gx, gy);
    }
  }
  return out;
}

DetectionResult segment_heatmaps(HeatmapStack heatmaps, int width, int height,
                                 const DetectConfig& cfg) {
  cfg.validate();
  heatmaps.validate();
  DetectionResult r;
  r.heatmaps = std::move(heatmaps);
  parallel_for(kChannelCount, [&](std::size_t c) {
    r.filtered[c] = bilateral_filter(r.heatmaps.channels[c], cfg.sigma_s, cfg.sigma_r);
    r.upsampled[c] = clamp_unit(upsample_to_pixels(r.filtered[c], r.heatmaps.grid, width, height));
    ChannelOutcome& out = r.channels[c];
    const Histogram hist = histogram(r.upsampled[c], cfg.histogram_bins);
    try {
      out.otsu = otsu_threshold(hist);
    } catch (const DegenerateError&) {
      return;
    }
    out.selected = channel_select(*out.otsu, hist, cfg.select);
    if (!out.selected) return;
    try {
      const auto [m1, m2] = find_modes(hist, out.otsu->threshold);
      out.probability =
          random_walker(r.upsampled[c], m1, m2, cfg.walker, cfg.histogram_bins).probability;
    } catch (const DegenerateError&) {
      // Otsu binarization of the channel stands in for the diffusion result.
      out.walker_fallback = true;
      const double level = (out.otsu->threshold + 1.0) / cfg.histogram_bins;
      out.probability = Plane(width, height);
      for (std::size_t i = 0; i < out.probability.size(); ++i) {
        out.probability[i] = r.upsampled[c][i] >= level ? 1.0 : 0.0;
      }
    }
    out.mask = binarize(out.probability);
  });

  std::vector<BinaryMask> masks;
  std::vector<Plane> probs;
  for (const auto& ch : r.channels) {
    if (!ch.selected) continue;
    masks.push_back(ch.mask);
    probs.push_back(ch.probability);
  }
  r.mask = masks.empty() ? BinaryMask(width, height) : combine_or(masks);
  r.gray = gray_mask(probs, width, height);
  r.confidence = std::clamp(confidence_score(r.gray), 0.0, 1.0);
  return r;
}

DetectionResult detect(const ImageBuffer& img, std::span<const MlpModel> models,
                       const DetectConfig& cfg) {
  return segment_heatmaps(compute_heatmaps(img, models, cfg), img.width(), img.height(), cfg);
}

std::string_view to_string(LstmInput input) {
  switch (input) {
    case LstmInput::PMap: return "fast";
    case LstmInput::EmPMap: return "em";
    case LstmInput::Raw: return "raw";
  }
  return "fast";
}

LstmInput lstm_input_from_string(std::string_view name) {
  if (name == "fast") return LstmInput::PMap;
  if (name == "em") return LstmInput::EmPMap;
  if (name == "raw") return LstmInput::Raw;
  throw ParameterError("unknown classifier input '" + std::string(name) + "' (fast, em, raw)");
}

Plane lstm_input(const Plane& patch, LstmInput input, double pmap_sigma) {
  switch (input) {
    case LstmInput::Raw: return patch;
    case LstmInput::EmPMap:
      try {
        return em_pmap(patch).pmap;
      } catch (const DegenerateError&) {
        return fast_pmap(patch, PredictorKernel(), pmap_sigma);
      }
    case LstmInput::PMap: break;
  }
  return fast_pmap(patch, PredictorKernel(), pmap_sigma);
}

Plane lstm_detect(const ImageBuffer& img, const LstmModel& model, const LstmDetectConfig& cfg) {
  if (cfg.patch_size != model.arch.patch_size) {
    throw ShapeError("model expects " + std::to_string(model.arch.patch_size) + " px patches");
  }
  const PatchGrid grid = PatchGrid::for_image(img.width(), img.height(), cfg.patch_size, cfg.stride);
  std::vector<Plane> inputs(grid.count());
  parallel_for(grid.count(), [&](std::size_t i) {
    const int r = static_cast<int>(i) / grid.cols;
    const int c = static_cast<int>(i) % grid.cols;
    const auto [x, y] = grid.origin(r, c);
    inputs[i] = lstm_input(crop(img, x, y, cfg.patch_size, cfg.patch_size), cfg.input, cfg.pmap_sigma);
  });
  const auto p = lstm_predict_batch(model, inputs);
  return Plane(grid.cols, grid.rows, p);
}

LabeledSet feature_set(std::span<const Plane> patches, std::span<const int> labels,
                       const RadonConfig& cfg) {
  if (patches.size() != labels.size()) throw ShapeError("patch and label counts differ");
  LabeledSet set;
  set.inputs.resize(cfg.feature_length(), static_cast<Eigen::Index>(patches.size()));
  set.labels.assign(labels.begin(), labels.end());
  parallel_for(patches.size(), [&](std::size_t i) {
    const auto f = radon_resampling_feature(patches[i], cfg);
    set.inputs.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Vector>(f.values.data(), cfg.feature_length());
  });
  return set;
}

}  // namespace rsf
