#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rsf/dataset.hpp"
#include "rsf/features.hpp"
#include "rsf/lstm.hpp"
#include "rsf/mlp.hpp"
#include "rsf/model_io.hpp"
#include "rsf/pipeline.hpp"
#include "rsf/qda.hpp"
#include "rsf/segmentation.hpp"
#include "rsf/synth.hpp"
#include "test_util.hpp"

namespace rsf {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

constexpr int kSourceCount = 100;
constexpr int kSourceSize = 384;
constexpr int kPatchCount = 2500;

std::vector<SourceImage> make_sources() {
  std::vector<SourceImage> src;
  for (int i = 0; i < kSourceCount; ++i) {
    src.push_back({"s" + std::to_string(i), synthesize_raw_image(kSourceSize, kSourceSize, 1000 + i)});
  }
  return src;
}

const std::vector<SourceImage>& sources() {
  static const std::vector<SourceImage> src = make_sources();
  return src;
}

struct Split2 {
  std::vector<Plane> train, test;
  std::vector<int> train_labels, test_labels;
};

Split2 split(const PatchDataset& ds) {
  Split2 s;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const bool tr = ds.records[i].split == Split::Train;
    (tr ? s.train : s.test).push_back(ds.patches[i]);
    (tr ? s.train_labels : s.test_labels).push_back(ds.records[i].label);
  }
  return s;
}

bool sources_disjoint(const PatchDataset& ds) {
  std::set<std::string> train, test;
  for (const auto& r : ds.records) (r.split == Split::Train ? train : test).insert(r.source);
  for (const auto& s : test) {
    if (train.count(s)) return false;
  }
  return true;
}

struct MlpRun {
  double auc = 0.0;
  double qda_auc = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool disjoint = false;
  std::string model_bytes;
  double seconds = 0.0;
};

MlpRun run_mlp_experiment(const std::vector<SourceImage>& src, Task task, int patch_size, bool with_qda) {
  const auto t0 = Clock::now();
  DatasetOptions o;
  o.patch_size = patch_size;
  o.chain.allow_jpeg = false;
  o.chain.max_extra_steps = 0;
  o.chain.upscale_min = 1.1;
  const PatchDataset ds = build_patch_dataset(src, task, kPatchCount, 7, o);
  const Split2 s = split(ds);
  const RadonConfig rc = RadonConfig::for_patch(patch_size);
  const LabeledSet train = feature_set(s.train, s.train_labels, rc);
  const LabeledSet test = feature_set(s.test, s.test_labels, rc);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 3;
  cfg.weight_decay = 1e-2;
  const MlpModel m = train_mlp(train, cfg);
  const Matrix p = m.forward_batch(test.inputs);
  const std::vector<double> scores(p.data(), p.data() + p.size());

  MlpRun r;
  r.auc = evaluate_roc(scores, s.test_labels).auc;
  r.n_train = s.train.size();
  r.n_test = s.test.size();
  r.disjoint = sources_disjoint(ds);
  if (with_qda) {
    const QdaModel q = qda_fit(train);
    std::vector<double> qs;
    for (Eigen::Index i = 0; i < test.inputs.cols(); ++i) {
      const Vector c = test.inputs.col(i);
      qs.push_back(qda_score(q, std::span<const double>(c.data(), static_cast<std::size_t>(c.size()))));
    }
    r.qda_auc = evaluate_roc(qs, s.test_labels).auc;
  }
  test::TempDir dir("accept");
  save_mlp(dir / "m.rsnn", m);
  r.model_bytes = slurp(dir / "m.rsnn");
  r.seconds = seconds_since(t0);
  return r;
}

struct LstmRun {
  double auc = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::string model_bytes;
  double seconds = 0.0;
};

// Four 8-bit gray levels.
constexpr double kSplicePmapSigma = 4.0 / 255.0;

LstmArch acceptance_lstm_arch() {
  LstmArch a;
  a.hidden = 32;
  return a;
}

TrainConfig acceptance_lstm_train() {
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 5;
  cfg.batch_size = 32;
  cfg.weight_decay = 1e-3;
  return cfg;
}

LstmRun run_lstm_experiment(const std::vector<SourceImage>& src, LstmInput input) {
  const auto t0 = Clock::now();
  const PatchDataset ds = build_splice_dataset(src, kPatchCount, 21);
  LabeledPatches train, test;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    auto& d = ds.records[i].split == Split::Train ? train : test;
    d.patches.push_back(lstm_input(ds.patches[i], input, kSplicePmapSigma));
    d.labels.push_back(ds.records[i].label);
  }
  const LstmModel m = train_lstm_classifier(train, acceptance_lstm_train(), acceptance_lstm_arch());
  LstmRun r;
  r.auc = evaluate_roc(lstm_predict_batch(m, test.patches), test.labels).auc;
  r.n_train = train.patches.size();
  r.n_test = test.patches.size();
  test::TempDir dir("accept");
  save_lstm(dir / "l.rsnn", m);
  r.model_bytes = slurp(dir / "l.rsnn");
  r.seconds = seconds_since(t0);
  return r;
}

std::map<std::pair<int, int>, MlpRun>& mlp_cache() {
  static std::map<std::pair<int, int>, MlpRun> c;
  return c;
}

const MlpRun& mlp_run(Task task, int patch_size) {
  auto& c = mlp_cache();
  const auto key = std::make_pair(static_cast<int>(task), patch_size);
  auto it = c.find(key);
  if (it == c.end()) {
    const bool qda = task == Task::Upsample && patch_size == 64;
    it = c.emplace(key, run_mlp_experiment(sources(), task, patch_size, qda)).first;
    std::printf("  [%s %dx%d] AUC %.4f train %zu test %zu disjoint %d  %.1fs\n", std::string(to_string(task)).c_str(),
                patch_size, patch_size, it->second.auc, it->second.n_train, it->second.n_test, it->second.disjoint,
                it->second.seconds);
    std::fflush(stdout);
  }
  return it->second;
}

std::map<int, LstmRun>& lstm_cache() {
  static std::map<int, LstmRun> c;
  return c;
}

const LstmRun& lstm_run(LstmInput input) {
  auto& c = lstm_cache();
  auto it = c.find(static_cast<int>(input));
  if (it == c.end()) {
    it = c.emplace(static_cast<int>(input), run_lstm_experiment(sources(), input)).first;
    std::printf("  [lstm %s] AUC %.4f train %zu test %zu  %.1fs\n", std::string(to_string(input)).c_str(),
                it->second.auc, it->second.n_train, it->second.n_test, it->second.seconds);
    std::fflush(stdout);
  }
  return it->second;
}

MlpModel random_mlp(const std::vector<int>& sizes, std::uint64_t seed) {
  MlpModel m = MlpModel::initialized(sizes, seed);
  std::mt19937_64 rng(seed ^ 0x5eed);
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto& l : m.layers) {
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = n(rng);
  }
  return m;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst_mlp = 0.0;
  double worst_lstm = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<int> width(1, 8);
    std::vector<int> sizes = {width(rng)};
    const int hidden_layers = 1 + t % 3;
    for (int l = 0; l < hidden_layers; ++l) sizes.push_back(width(rng));
    sizes.push_back(1);
    const MlpModel m = random_mlp(sizes, 7000 + t);
    const int batch = 1 + t % 4;
    Matrix x(sizes[0], batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    std::vector<int> y;
    for (int j = 0; j < batch; ++j) y.push_back(static_cast<int>(rng() % 2));
    worst_mlp = std::max(worst_mlp, mlp_gradient_check(m, x, y, 1e-5).max_relative_error);
  }
  for (int t = 0; t < 100; ++t) {
    LstmArch a;
    a.block_size = 1 + static_cast<int>(rng() % 3);
    a.patch_size = a.block_size * (1 + static_cast<int>(rng() % 3));
    a.hidden = 1 + static_cast<int>(rng() % 5);
    a.layers = 1 + static_cast<int>(rng() % 3);
    a.conv_filters = 1 + static_cast<int>(rng() % 4);
    LstmModel m = LstmModel::initialized(a, 8000 + t);
    std::normal_distribution<double> noise(0.0, 0.5);
    for (auto& p : m.params()) {
      for (std::size_t i = 0; i < p.size; ++i) p.data[i] += noise(rng);
    }
    std::vector<Plane> patches;
    std::vector<int> y;
    for (int j = 0; j < 2; ++j) {
      patches.push_back(test::random_plane(a.patch_size, a.patch_size, rng()));
      y.push_back(static_cast<int>(rng() % 2));
    }
    worst_lstm = std::max(worst_lstm, lstm_gradient_check(m, patches, y, 1e-5).max_relative_error);
  }
  const double secs = seconds_since(t0);
  return {worst_mlp < 1e-4 && worst_lstm < 1e-4 && secs < 120.0,
          fmt("max rel err MLP %.2e LSTM %.2e over 100+100 configs, %.1fs", worst_mlp, worst_lstm, secs)};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  int pass = 0;
  const int n = 20;
  double worst = 1e300;
  for (int i = 0; i < n; ++i) {
    const ImageBuffer img = synthesize_raw_image(256, 256, 100 + i);
    const ImageBuffer up = quantize_8bit(clamp_unit(affine_resample(img, AffineMap::scale(1.5))));
    const double r0 = spectral_peak_ratio(pmap_spectrum(fast_pmap(crop(img, 0, 0, 256, 256))));
    const double r1 = spectral_peak_ratio(pmap_spectrum(fast_pmap(crop(up, 64, 64, 256, 256))));
    worst = std::min(worst, r1 / r0);
    if (r1 >= 3.0 * r0) ++pass;
  }
  const double secs = seconds_since(t0);
  return {pass * 10 >= n * 9 && secs < 120.0,
          fmt("%d/%d images reach 3x (smallest ratio quotient %.2f), %.1fs", pass, n, worst, secs)};
}

Outcome criterion3() {
  int ok = 0;
  double worst = 0.0;
  int most_iters = 0;
  for (int t = 0; t < 20; ++t) {
    const Kernel3x3 alpha = oracle::random_alpha(3000 + t);
    const Plane img = oracle::fixed_point_image(alpha, 32, 32, 4000 + t);
    const EmResult r = em_pmap(img, {50, 1e-8});
    double err = 0.0;
    for (int k = 0; k < 9; ++k) err = std::max(err, std::abs(r.state.kernel[k] - alpha[k]));
    worst = std::max(worst, err);
    most_iters = std::max(most_iters, r.state.iterations);
    if (err < 1e-3 && r.state.iterations <= 50) ++ok;
  }
  return {ok == 20, fmt("%d/20 trials, max coefficient error %.2e, max iterations %d", ok, worst, most_iters)};
}

Outcome criterion4() {
  const MlpRun& up = mlp_run(Task::Upsample, 64);
  bool pass = up.auc >= 0.85 && up.seconds < 600.0 && up.disjoint;
  std::string detail = fmt("upsample %.4f (%.0fs)", up.auc, up.seconds);
  for (Task t : {Task::Downsample, Task::RotateCw, Task::RotateCcw, Task::Shear}) {
    const MlpRun& r = mlp_run(t, 64);
    pass = pass && r.auc >= 0.70 && r.disjoint;
    detail += fmt(", %s %.4f", std::string(to_string(t)).c_str(), r.auc);
  }
  return {pass, detail};
}

Outcome criterion5() {
  const MlpRun& up = mlp_run(Task::Upsample, 64);
  return {up.auc >= up.qda_auc, fmt("upsample MLP AUC %.6f, QDA AUC %.6f", up.auc, up.qda_auc)};
}

Outcome criterion6() {
  const MlpRun& a = mlp_run(Task::Upsample, 64);
  const MlpRun& b = mlp_run(Task::Upsample, 128);
  return {b.auc >= a.auc - 0.01, fmt("AUC 128x128 %.4f, 64x64 %.4f", b.auc, a.auc)};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  int otsu_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    Histogram h;
    h.counts.assign(256, 0);
    const int style = t % 3;
    if (style == 0) {
      for (auto& v : h.counts) v = rng() % 1000;
    } else if (style == 1) {
      for (int k = 0; k < 2 + t % 9; ++k) h.counts[rng() % 256] += 1 + rng() % 100;
    } else {
      for (auto& v : h.counts) v = rng() % 4 == 0 ? rng() % 1000000000ULL : 0;
    }
    if (std::count_if(h.counts.begin(), h.counts.end(), [](auto v) { return v > 0; }) < 2) {
      h.counts[0] += 1;
      h.counts[255] += 1;
    }
    if (otsu_threshold(h).threshold == oracle::brute_force_otsu(h.counts).threshold) ++otsu_ok;
  }

  double walker_err = 0.0;
  int grids = 0;
  for (int hgt = 1; hgt <= 8; ++hgt) {
    for (int w = 1; w <= 8; ++w) {
      if (w * hgt < 2) continue;
      for (int rep = 0; rep < 20; ++rep) {
        const Plane g = test::random_plane(w, hgt, rng());
        SeedMap seeds(g.size(), -1);
        std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
        const std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        while (b == a) b = pick(rng);
        seeds[a] = 0;
        seeds[b] = 1;
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (seeds[i] < 0 && rng() % 5 == 0) seeds[i] = static_cast<std::int8_t>(rng() % 2);
        }
        const Plane p = random_walker_seeded(g, seeds).probability;
        walker_err = std::max(walker_err, test::max_abs_diff(p, oracle::dense_random_walker(g, seeds, 90.0)));
        ++grids;
      }
    }
  }

  bool bilateral_ok = true;
  for (int t = 0; t < 50; ++t) {
    const double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Plane c(3 + t % 20, 2 + t % 13, v);
    const Plane out = bilateral_filter(c, 0.5 + 0.1 * t, 0.01 + 0.02 * t);
    for (std::size_t i = 0; i < out.size(); ++i) bilateral_ok = bilateral_ok && out[i] == v;
  }
  const double secs = seconds_since(t0);
  return {otsu_ok == 1000 && walker_err <= 1e-6 && bilateral_ok && secs < 60.0,
          fmt("otsu %d/1000 exact, walker max err %.2e over %d grids, bilateral constants %s, %.1fs", otsu_ok,
              walker_err, grids, bilateral_ok ? "exact" : "changed", secs)};
}

Outcome criterion8() {
  auto t0 = Clock::now();
  std::vector<MlpModel> models;
  for (int c = 0; c < kChannelCount; ++c) {
    const PatchDataset ds = build_patch_dataset(sources(), static_cast<Task>(c), kPatchCount, 11 + c, {});
    std::vector<Plane> patches;
    std::vector<int> labels;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      patches.push_back(ds.patches[i]);
      labels.push_back(ds.records[i].label);
    }
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.seed = 3;
    cfg.weight_decay = 1e-2;
    models.push_back(train_mlp(feature_set(patches, labels, RadonConfig::for_patch(64)), cfg));
  }
  std::printf("  [channel models] %.1fs\n", seconds_since(t0));
  std::fflush(stdout);

  t0 = Clock::now();
  std::vector<double> ious;
  int wins = 0;
  for (int k = 0; k < 20; ++k) {
    const ImageBuffer base = synthesize_raw_image(512, 512, 5000 + k);
    const ImageBuffer donor = synthesize_raw_image(512, 512, 6000 + k);
    std::mt19937_64 rng(k);
    const double f = std::uniform_real_distribution<double>(1.1, 2.0)(rng);
    const int x = std::uniform_int_distribution<int>(32, 512 - 96 - 32)(rng);
    const int y = std::uniform_int_distribution<int>(32, 512 - 96 - 32)(rng);
    TransformChain chain;
    chain.steps.push_back({TransformKind::UpScale, f});
    const SpliceResult sp = splice_forgery(base, donor, chain, Rect{x, y, 96, 96});
    const DetectionResult forged = detect(sp.image, models);
    const DetectionResult pristine = detect(base, models);
    ious.push_back(iou(forged.mask, sp.mask));
    if (forged.confidence > pristine.confidence) ++wins;
  }
  const double secs = seconds_since(t0);
  std::sort(ious.begin(), ious.end());
  const double median = (ious[9] + ious[10]) / 2.0;
  return {median >= 0.3 && wins >= 16 && secs < 900.0,
          fmt("median IoU %.3f, confidence wins %d/20, detection %.1fs", median, wins, secs)};
}

Outcome criterion9() {
  const LstmRun& pm = lstm_run(LstmInput::PMap);
  const LstmRun& raw = lstm_run(LstmInput::Raw);
  return {pm.auc >= 0.80 && pm.auc > raw.auc,
          fmt("p-map input AUC %.4f, raw input AUC %.4f (train %zu / test %zu)", pm.auc, raw.auc, pm.n_train,
              pm.n_test)};
}

Outcome criterion10() {
  const MlpRun& a = mlp_run(Task::Upsample, 64);
  const MlpRun b = run_mlp_experiment(make_sources(), Task::Upsample, 64, true);
  const LstmRun& c = lstm_run(LstmInput::PMap);
  const LstmRun d = run_lstm_experiment(make_sources(), LstmInput::PMap);
  const bool mlp_same = a.model_bytes == b.model_bytes && a.auc == b.auc && a.qda_auc == b.qda_auc;
  const bool lstm_same = c.model_bytes == d.model_bytes && c.auc == d.auc;
  return {mlp_same && lstm_same, fmt("criterion-4 rerun %s, criterion-9 rerun %s",
                                     mlp_same ? "identical" : "differs", lstm_same ? "identical" : "differs")};
}

}  // namespace
}  // namespace rsf

int main(int argc, char** argv) {
  using namespace rsf;
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
    if (!wanted.empty() && !wanted.count(k)) continue;
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", k, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
