#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rsf/features.hpp"
#include "rsf/lstm.hpp"
#include "rsf/mlp.hpp"
#include "rsf/segmentation.hpp"

namespace rsf {

struct DetectConfig {
  int patch_size = 64;
  int stride = 8;
  int angles = 8;
  double sigma_s = 2.0;  // heatmap cells
  double sigma_r = 0.1;
  ChannelSelectRule select;
  RandomWalkerOptions walker;
  int histogram_bins = 256;

  void validate() const;
};

struct ChannelOutcome {
  std::optional<OtsuResult> otsu;  // empty when the histogram is degenerate
  bool selected = false;
  bool walker_fallback = false;    // seeding failed, Otsu binarization used
  Plane probability;               // pixel resolution; empty if not selected
  BinaryMask mask;                 // empty if not selected
};

struct DetectionResult {
  HeatmapStack heatmaps;                        // raw classifier scores
  std::array<Plane, kChannelCount> filtered;    // bilateral-filtered, grid resolution
  std::array<Plane, kChannelCount> upsampled;   // filtered, pixel resolution
  std::array<ChannelOutcome, kChannelCount> channels;
  Plane gray;
  BinaryMask mask;
  double confidence = 0.0;

  std::vector<Channel> selected_channels() const;
};

/// Radon features of every patch on the grid scored by each channel's model.
HeatmapStack compute_heatmaps(const ImageBuffer& img, std::span<const MlpModel> models,
                              const DetectConfig& cfg = {});

/// Bilinear interpolation of a grid map to pixels, with cell (r, c) anchored at
/// the center of patch (r, c) and clamped beyond the outermost centers.
Plane upsample_to_pixels(const Plane& grid_map, const PatchGrid& grid, int width, int height);

/// Segmentation stage of detect() on precomputed heatmaps.
DetectionResult segment_heatmaps(HeatmapStack heatmaps, int width, int height,
                                 const DetectConfig& cfg = {});

/// Full pipeline 1. models are indexed by Channel.
DetectionResult detect(const ImageBuffer& img, std::span<const MlpModel> models,
                       const DetectConfig& cfg = {});

enum class LstmInput { PMap, EmPMap, Raw };

std::string_view to_string(LstmInput input);
LstmInput lstm_input_from_string(std::string_view name);

struct LstmDetectConfig {
  int patch_size = 64;
  int stride = 8;
  LstmInput input = LstmInput::PMap;
  double pmap_sigma = kDefaultPmapSigma;
};

/// What the classifier sees for one patch. The EM map falls back to the fast
/// map on patches whose normal equations are singular (flat content).
Plane lstm_input(const Plane& patch, LstmInput input, double pmap_sigma = kDefaultPmapSigma);

/// Per-patch manipulation probability on the patch grid.
Plane lstm_detect(const ImageBuffer& img, const LstmModel& model, const LstmDetectConfig& cfg = {});

/// Radon feature matrix (one column per patch) for MLP/QDA training.
LabeledSet feature_set(std::span<const Plane> patches, std::span<const int> labels,
                       const RadonConfig& cfg);

struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;  // score at or above which a sample is positive
  double auc = 0.0;
};

/// Threshold sweep over unique scores, descending; tied scores move together.
RocCurve evaluate_roc(std::span<const double> scores, std::span<const int> labels);

double iou(const BinaryMask& mask, const BinaryMask& truth);
double pixel_f1(const BinaryMask& mask, const BinaryMask& truth);

}  // namespace rsf
