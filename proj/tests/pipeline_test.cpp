#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rsf/errors.hpp"
#include "rsf/pipeline.hpp"
#include "rsf/synth.hpp"
#include "test_util.hpp"

namespace rsf {
namespace {

std::vector<MlpModel> random_models(int feature_length, std::uint64_t seed) {
  std::vector<MlpModel> models;
  for (int c = 0; c < kChannelCount; ++c) {
    models.push_back(MlpModel::initialized({feature_length, 16, 8, 1}, seed + c));
  }
  return models;
}

// Six channels on the grid of a size×size image: `hot` holds a bright block,
// the others stay flat.
HeatmapStack block_stack(int size, int hot, double inside, double outside) {
  HeatmapStack s;
  s.grid = PatchGrid::for_image(size, size, 64, 8);
  for (int c = 0; c < kChannelCount; ++c) s.channels[c] = Plane(s.grid.cols, s.grid.rows, 0.2);
  Plane& h = s.channels[hot];
  h = Plane(s.grid.cols, s.grid.rows, outside);
  for (int r = s.grid.rows / 3; r < 2 * s.grid.rows / 3; ++r) {
    for (int c = s.grid.cols / 3; c < 2 * s.grid.cols / 3; ++c) h.at(c, r) = inside;
  }
  return s;
}

TEST(Roc, PerfectSeparation) {
  const std::vector<double> s = {0.1, 0.2, 0.3, 0.8, 0.9};
  const std::vector<int> y = {0, 0, 0, 1, 1};
  const RocCurve r = evaluate_roc(s, y);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_EQ(r.fpr.front(), 0.0);
  EXPECT_EQ(r.tpr.front(), 0.0);
  EXPECT_EQ(r.fpr.back(), 1.0);
  EXPECT_EQ(r.tpr.back(), 1.0);
}

TEST(Roc, TiesMoveTogether) {
  const std::vector<double> s = {0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y = {0, 1, 0, 1};
  const RocCurve r = evaluate_roc(s, y);
  EXPECT_DOUBLE_EQ(r.auc, 0.5);
  EXPECT_EQ(r.fpr.size(), 2u);
}

TEST(Roc, RandomScoresNearHalf) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(20000);
  std::vector<int> y(20000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    y[i] = static_cast<int>(rng() % 2);
  }
  EXPECT_NEAR(evaluate_roc(s, y).auc, 0.5, 0.05);
}

TEST(Roc, Properties) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int m = 10 + t * 7;
    std::vector<double> s(m);
    std::vector<int> y(m);
    for (int i = 0; i < m; ++i) {
      y[i] = i % 3 == 0 ? 1 : 0;
      s[i] = std::round((n(rng) + 0.8 * y[i]) * 4) / 4;  // coarse values force ties
    }
    const RocCurve r = evaluate_roc(s, y);
    for (std::size_t k = 1; k < r.fpr.size(); ++k) {
      EXPECT_GE(r.fpr[k], r.fpr[k - 1]);
      EXPECT_GE(r.tpr[k], r.tpr[k - 1]);
      EXPECT_LT(r.thresholds[k], r.thresholds[k - 1]);
    }
    std::vector<double> neg(m);
    std::vector<double> mono(m);
    for (int i = 0; i < m; ++i) {
      neg[i] = -s[i];
      mono[i] = std::exp(3.0 * s[i]) + 7.0;
    }
    EXPECT_NEAR(evaluate_roc(neg, y).auc, 1.0 - r.auc, 1e-12);
    EXPECT_DOUBLE_EQ(evaluate_roc(mono, y).auc, r.auc);

    // Mann-Whitney statistic with ties counted as one half.
    double wins = 0.0;
    int pairs = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        ++pairs;
      }
    }
    EXPECT_NEAR(r.auc, wins / pairs, 1e-12);
  }
}

TEST(Roc, Errors) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(evaluate_roc(s, std::vector<int>{1, 1}), EvaluationError);
  EXPECT_THROW(evaluate_roc(s, std::vector<int>{0, 1, 1}), ShapeError);
}

TEST(MaskMetrics, Cases) {
  BinaryMask a(8, 8);
  BinaryMask b(8, 8);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) a.set(x, y, true);
  }
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(pixel_f1(a, a), 1.0);
  for (int y = 4; y < 8; ++y) {
    for (int x = 4; x < 8; ++x) b.set(x, y, true);
  }
  EXPECT_DOUBLE_EQ(iou(a, b), 0.0);
  EXPECT_DOUBLE_EQ(pixel_f1(a, b), 0.0);
  BinaryMask half(8, 8);
  for (int y = 0; y < 4; ++y) {
    for (int x = 2; x < 6; ++x) half.set(x, y, true);
  }
  EXPECT_NEAR(iou(a, half), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(pixel_f1(a, half), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(iou(BinaryMask(3, 3), BinaryMask(3, 3)), 1.0);
  EXPECT_THROW(iou(a, BinaryMask(4, 4)), ShapeError);
}

TEST(Upsample, AnchorsAtPatchCenters) {
  const PatchGrid grid = PatchGrid::for_image(128, 96, 64, 8);
  Plane g(grid.cols, grid.rows);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) g.at(c, r) = 0.1 + 0.01 * c + 0.02 * r;
  }
  const Plane up = upsample_to_pixels(g, grid, 128, 96);
  for (int y = 0; y < 96; ++y) {
    for (int x = 0; x < 128; ++x) {
      const double gx = std::clamp((x + 0.5 - 32.0) / 8.0, 0.0, grid.cols - 1.0);
      const double gy = std::clamp((y + 0.5 - 32.0) / 8.0, 0.0, grid.rows - 1.0);
      EXPECT_NEAR(up.at(x, y), 0.1 + 0.01 * gx + 0.02 * gy, 1e-12);
    }
  }
  EXPECT_THROW(upsample_to_pixels(Plane(2, 2), grid, 128, 96), ShapeError);
}

TEST(Segment, BimodalChannelIsLocalized) {
  const int size = 192;
  const HeatmapStack s = block_stack(size, static_cast<int>(Channel::Upsample), 0.9, 0.1);
  const DetectionResult r = segment_heatmaps(s, size, size);
  const auto sel = r.selected_channels();
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0], Channel::Upsample);
  EXPECT_EQ(r.mask.width(), size);
  EXPECT_EQ(r.mask.height(), size);
  EXPECT_GT(r.mask.count(), 0u);
  EXPECT_LT(r.mask.count(), static_cast<std::size_t>(size * size / 2));
  EXPECT_TRUE(r.mask.at(size / 2, size / 2));
  EXPECT_FALSE(r.mask.at(2, 2));
  EXPECT_GT(r.confidence, 0.0);
  EXPECT_LE(r.confidence, 1.0);
  for (int c = 0; c < kChannelCount; ++c) {
    if (c == static_cast<int>(Channel::Upsample)) continue;
    EXPECT_FALSE(r.channels[c].otsu.has_value());
    EXPECT_FALSE(r.channels[c].selected);
  }
}

TEST(Segment, LowAmplitudeChannelIsNotSelected) {
  const int size = 192;
  const HeatmapStack s = block_stack(size, static_cast<int>(Channel::JpegQuality), 0.12, 0.0);
  const DetectionResult r = segment_heatmaps(s, size, size);
  ASSERT_TRUE(r.channels[0].otsu.has_value());
  EXPECT_GT(r.channels[0].otsu->eta, 0.8);
  EXPECT_TRUE(r.selected_channels().empty());
  EXPECT_EQ(r.mask.count(), 0u);
  EXPECT_EQ(r.confidence, 0.0);
}

TEST(Segment, NothingSelectedGivesEmptyMask) {
  HeatmapStack s;
  s.grid = PatchGrid::for_image(96, 96, 64, 8);
  for (int c = 0; c < kChannelCount; ++c) s.channels[c] = test::random_plane(s.grid.cols, s.grid.rows, c, 0.4, 0.6);
  DetectConfig cfg;
  cfg.select.eta_min = 1.0;
  const DetectionResult r = segment_heatmaps(s, 96, 96, cfg);
  EXPECT_TRUE(r.selected_channels().empty());
  EXPECT_EQ(r.mask.count(), 0u);
  EXPECT_EQ(r.confidence, 0.0);
}

TEST(Detect, GridSizeAndBounds) {
  const RadonConfig radon = RadonConfig::for_patch(64);
  const auto models = random_models(radon.feature_length(), 3);
  const ImageBuffer img = synthesize_raw_image(128, 128, 5);
  const DetectionResult r = detect(img, models);
  EXPECT_EQ(r.heatmaps.grid.rows, 9);
  EXPECT_EQ(r.heatmaps.grid.cols, 9);
  for (int c = 0; c < kChannelCount; ++c) {
    EXPECT_EQ(r.heatmaps.channels[c].width(), 9);
    EXPECT_EQ(r.upsampled[c].width(), 128);
    EXPECT_TRUE(in_unit_range(r.heatmaps.channels[c]));
  }
  EXPECT_EQ(r.mask.width(), 128);
  EXPECT_EQ(r.gray.height(), 128);
  EXPECT_GE(r.confidence, 0.0);
  EXPECT_LE(r.confidence, 1.0);
}

TEST(Detect, HeatmapMatchesPerPatchScoring) {
  const RadonConfig radon = RadonConfig::for_patch(64);
  const auto models = random_models(radon.feature_length(), 11);
  const ImageBuffer img = synthesize_raw_image(96, 80, 6);
  const HeatmapStack s = compute_heatmaps(img, models);
  for (int r = 0; r < s.grid.rows; ++r) {
    for (int c = 0; c < s.grid.cols; ++c) {
      const auto [x, y] = s.grid.origin(r, c);
      const auto f = radon_resampling_feature(crop(img, x, y, 64, 64), radon);
      for (int k = 0; k < kChannelCount; ++k) {
        EXPECT_NEAR(s.channels[k].at(c, r), models[k].forward(f.values), 1e-12);
      }
    }
  }
}

TEST(Detect, Deterministic) {
  const RadonConfig radon = RadonConfig::for_patch(64);
  const auto models = random_models(radon.feature_length(), 21);
  const ImageBuffer img = synthesize_raw_image(112, 112, 7);
  const DetectionResult a = detect(img, models);
  const DetectionResult b = detect(img, models);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.gray, b.gray);
  EXPECT_EQ(a.confidence, b.confidence);
  for (int c = 0; c < kChannelCount; ++c) EXPECT_EQ(a.heatmaps.channels[c], b.heatmaps.channels[c]);
}

TEST(Detect, InputErrors) {
  const RadonConfig radon = RadonConfig::for_patch(64);
  const auto models = random_models(radon.feature_length(), 1);
  EXPECT_THROW(detect(synthesize_raw_image(48, 80, 1), models), DimensionError);
  const std::vector<MlpModel> five(models.begin(), models.begin() + 5);
  EXPECT_THROW(detect(synthesize_raw_image(64, 64, 1), five), ParameterError);
  const auto wrong = random_models(10, 1);
  EXPECT_THROW(detect(synthesize_raw_image(64, 64, 1), wrong), ShapeError);
}

TEST(LstmDetect, GridShapeAndDeterminism) {
  LstmArch arch;
  arch.hidden = 8;
  const LstmModel m = LstmModel::initialized(arch, 4);
  const ImageBuffer img = synthesize_raw_image(96, 80, 2);
  const Plane p = lstm_detect(img, m);
  EXPECT_EQ(p.width(), 5);
  EXPECT_EQ(p.height(), 3);
  EXPECT_TRUE(in_unit_range(p));
  EXPECT_EQ(lstm_detect(img, m), p);
  LstmDetectConfig raw;
  raw.input = LstmInput::Raw;
  const Plane q = lstm_detect(img, m, raw);
  const auto [x, y] = std::make_pair(16, 8);
  EXPECT_NEAR(q.at(2, 1), lstm_predict(m, crop(img, x, y, 64, 64))[1], 1e-12);
  EXPECT_THROW(lstm_detect(synthesize_raw_image(32, 32, 1), m), DimensionError);
}

TEST(LstmInputs, Kinds) {
  const Plane patch = synthesize_raw_image(64, 64, 3);
  EXPECT_EQ(lstm_input(patch, LstmInput::Raw), patch);
  EXPECT_EQ(lstm_input(patch, LstmInput::PMap), fast_pmap(patch));
  const Plane flat(64, 64, 0.5);
  EXPECT_EQ(lstm_input(flat, LstmInput::EmPMap).width(), 64);
  for (auto k : {LstmInput::PMap, LstmInput::EmPMap, LstmInput::Raw}) {
    EXPECT_EQ(lstm_input_from_string(to_string(k)), k);
  }
  EXPECT_THROW(lstm_input_from_string("dct"), ParameterError);
}

TEST(FeatureSet, ColumnsAreFeatures) {
  const RadonConfig radon = RadonConfig::for_patch(32, 4);
  std::vector<Plane> patches = {synthesize_raw_image(32, 32, 1), synthesize_raw_image(32, 32, 2)};
  const std::vector<int> labels = {0, 1};
  const LabeledSet s = feature_set(patches, labels, radon);
  ASSERT_EQ(s.inputs.rows(), radon.feature_length());
  ASSERT_EQ(s.inputs.cols(), 2);
  for (int j = 0; j < 2; ++j) {
    const auto f = radon_resampling_feature(patches[j], radon);
    for (int i = 0; i < radon.feature_length(); ++i) EXPECT_EQ(s.inputs(i, j), f.values[i]);
  }
  EXPECT_EQ(s.labels, labels);
}

}  // namespace
}  // namespace rsf
