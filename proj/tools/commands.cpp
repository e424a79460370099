#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "report.hpp"
#include "rsf/dataset.hpp"
#include "rsf/model_io.hpp"
#include "rsf/parallel.hpp"
#include "rsf/random.hpp"
#include "rsf/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsf::cli {

namespace {

fs::path require_path(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string("missing required path: ") + what);
  return value;
}

fs::path require_existing(const std::string& value, const char* what) {
  fs::path p = require_path(value, what);
  if (!fs::exists(p)) throw ConfigError(std::string(what) + " '" + value + "' does not exist");
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct SplitData {
  std::vector<Plane> train;
  std::vector<int> train_labels;
  std::vector<Plane> test;
  std::vector<int> test_labels;
};

SplitData split(const PatchDataset& ds) {
  SplitData s;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    if (ds.records[i].split == Split::Train) {
      s.train.push_back(ds.patches[i]);
      s.train_labels.push_back(ds.records[i].label);
    } else {
      s.test.push_back(ds.patches[i]);
      s.test_labels.push_back(ds.records[i].label);
    }
  }
  if (s.train.empty()) throw DatasetError("dataset has no training patches");
  return s;
}

int uniform_patch_size(const std::vector<Plane>& patches) {
  const int p = patches.front().width();
  for (const auto& q : patches) {
    if (q.width() != p || q.height() != p) throw ShapeError("dataset patches differ in size");
  }
  return p;
}

// Loads --data if given, otherwise generates a dataset from the sources.
PatchDataset obtain_dataset(const RunConfig& cfg, const std::string& task, int n) {
  if (!cfg.paths.data.empty()) {
    PatchDataset ds = read_patch_dataset(require_existing(cfg.paths.data, "dataset directory"));
    PatchDataset filtered;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      if (ds.records[i].task != task) continue;
      filtered.records.push_back(ds.records[i]);
      filtered.patches.push_back(ds.patches[i]);
    }
    if (filtered.records.empty()) {
      throw DatasetError("dataset " + cfg.paths.data + " has no patches for task '" + task + "'");
    }
    return filtered;
  }
  const auto sources = load_source_images(require_existing(cfg.paths.sources, "source directory"));
  if (task == kSpliceTask) {
    SpliceDatasetOptions o;
    o.patch_size = cfg.patch_size;
    o.interp = cfg.interpolation();
    return build_splice_dataset(sources, n, cfg.seed, o);
  }
  DatasetOptions o;
  o.patch_size = cfg.patch_size;
  o.interp = cfg.interpolation();
  return build_patch_dataset(sources, task_from_string(task), n, cfg.seed, o);
}

TrainConfig seeded_train_config(const RunConfig& cfg) {
  TrainConfig t = cfg.train;
  t.seed = derive_seed(cfg.seed, SeedStream::Init);
  return t;
}

json loss_summary(const TrainReport& rep) {
  return {{"initial_loss", rep.initial_loss}, {"final_loss", rep.final_loss()},
          {"epoch_loss", rep.epoch_loss}};
}

std::optional<double> auc_or_none(std::span<const double> scores, std::span<const int> labels) {
  try {
    return evaluate_roc(scores, labels).auc;
  } catch (const EvaluationError&) {
    return std::nullopt;
  }
}

std::vector<std::pair<double, int>> read_scores_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::pair<double, int>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double score = 0.0;
    int label = 0;
    if (!(ss >> score >> label)) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 'score,label'");
    }
    if (label != 0 && label != 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    }
    rows.emplace_back(score, label);
  }
  return rows;
}

}  // namespace

void log_config(const RunConfig& cfg, const std::string& command) {
  std::cerr << "[rsf] " << command << " seed=" << cfg.seed << " config=" << to_json(cfg).dump()
            << std::endl;
}

int cmd_dataset_build(const RunConfig& cfg, const DatasetBuildArgs& args) {
  const fs::path out = require_path(cfg.paths.output, "output directory (--out)");
  const auto sources = load_source_images(require_existing(cfg.paths.sources, "source directory (--src)"));
  PatchDataset ds;
  if (args.task == kSpliceTask) {
    SpliceDatasetOptions o;
    o.patch_size = cfg.patch_size;
    o.interp = cfg.interpolation();
    ds = build_splice_dataset(sources, args.n, cfg.seed, o);
  } else {
    DatasetOptions o;
    o.patch_size = cfg.patch_size;
    o.interp = cfg.interpolation();
    if (args.clean) {
      o.chain.allow_jpeg = false;
      o.chain.max_extra_steps = 0;
    }
    ds = build_patch_dataset(sources, task_from_string(args.task), args.n, cfg.seed, o);
  }
  write_patch_dataset(out, ds);
  write_json(out / "config.json", to_json(cfg));
  std::size_t train = 0;
  std::size_t positives = 0;
  for (const auto& r : ds.records) {
    train += r.split == Split::Train ? 1 : 0;
    positives += static_cast<std::size_t>(r.label);
  }
  std::cout << json{{"task", args.task},
                    {"patches", ds.records.size()},
                    {"train", train},
                    {"test", ds.records.size() - train},
                    {"positives", positives},
                    {"sources", sources.size()}}
                   .dump()
            << std::endl;
  return 0;
}

int cmd_dataset_synth(const RunConfig& cfg, const SynthSourcesArgs& args) {
  if (args.count < 1) throw ParameterError("--count must be positive");
  if (args.size < 16) throw ParameterError("--size must be at least 16");
  const fs::path out = require_path(cfg.paths.output, "output directory (--out)");
  ensure_dir(out);
  for (int i = 0; i < args.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "synth_%04d.png", i);
    save_png(out / name, synthesize_raw_image(args.size, args.size,
                                              derive_seed(cfg.seed, SeedStream::Synth, i)));
  }
  std::cout << json{{"images", args.count}, {"size", args.size}, {"output", out.string()}}.dump()
            << std::endl;
  return 0;
}

int cmd_train_mlp(const RunConfig& cfg, const TrainArgs& args) {
  if (args.task.empty()) throw ConfigError("train mlp needs --task");
  task_from_string(args.task);
  const PatchDataset ds = obtain_dataset(cfg, args.task, args.n);
  const SplitData data = split(ds);
  const int p = uniform_patch_size(data.train);
  const RadonConfig radon = RadonConfig::for_patch(p, cfg.features.angles);
  const LabeledSet train = feature_set(data.train, data.train_labels, radon);
  const TrainConfig tc = seeded_train_config(cfg);
  TrainReport rep;
  const MlpModel model = train_mlp(train, tc, {radon.feature_length(), 128, 64, 1}, &rep);

  json summary = {{"task", args.task}, {"train_patches", data.train.size()},
                  {"test_patches", data.test.size()}, {"loss", loss_summary(rep)}};
  if (!data.test.empty()) {
    const LabeledSet test = feature_set(data.test, data.test_labels, radon);
    const Eigen::RowVectorXd s = model.forward_batch(test.inputs);
    const auto auc = auc_or_none(std::span<const double>(s.data(), s.size()), data.test_labels);
    summary["test_auc"] = auc ? json(*auc) : json(nullptr);
  }
  const fs::path out = args.model_out.empty()
                           ? require_path(cfg.paths.models, "model directory (--models)") /
                                 (args.task + ".rsnn")
                           : fs::path(args.model_out);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  save_mlp(out, model,
           {{"task", args.task},
            {"patch_size", p},
            {"angles", radon.angles},
            {"seed", cfg.seed},
            {"train", to_json(tc)},
            {"summary", summary}});
  summary["model"] = out.string();
  std::cout << summary.dump() << std::endl;
  return 0;
}

int cmd_train_lstm(const RunConfig& cfg, const TrainArgs& args) {
  const std::string task = args.task.empty() ? std::string(kSpliceTask) : args.task;
  const LstmInput input = lstm_input_from_string(args.input.empty() ? cfg.features.pmap : args.input);
  const PatchDataset ds = obtain_dataset(cfg, task, args.n);
  SplitData data = split(ds);
  const int p = uniform_patch_size(data.train);
  auto prepare = [&](std::vector<Plane>& patches) {
    parallel_for(patches.size(), [&](std::size_t i) {
      patches[i] = lstm_input(patches[i], input, cfg.features.pmap_sigma);
    });
  };
  prepare(data.train);
  prepare(data.test);
  LstmArch arch = cfg.lstm_arch();
  arch.patch_size = p;
  const TrainConfig tc = seeded_train_config(cfg);
  TrainReport rep;
  const LstmModel model = train_lstm_classifier({data.train, data.train_labels}, tc, arch, &rep);

  json summary = {{"task", task}, {"input", std::string(to_string(input))},
                  {"train_patches", data.train.size()}, {"test_patches", data.test.size()},
                  {"loss", loss_summary(rep)}};
  if (!data.test.empty()) {
    const auto s = lstm_predict_batch(model, data.test);
    const auto auc = auc_or_none(s, data.test_labels);
    summary["test_auc"] = auc ? json(*auc) : json(nullptr);
  }
  const fs::path out = args.model_out.empty()
                           ? require_path(cfg.paths.models, "model directory (--models)") / "lstm.rsnn"
                           : fs::path(args.model_out);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  save_lstm(out, model,
            {{"task", task},
             {"input", std::string(to_string(input))},
             {"pmap_sigma", cfg.features.pmap_sigma},
             {"seed", cfg.seed},
             {"train", to_json(tc)},
             {"summary", summary}});
  summary["model"] = out.string();
  std::cout << summary.dump() << std::endl;
  return 0;
}

int cmd_eval_roc(const RunConfig& cfg, const EvalRocArgs& args) {
  const auto rows = read_scores_csv(require_existing(args.scores_csv, "scores file (--scores)"));
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& [s, l] : rows) {
    scores.push_back(s);
    labels.push_back(l);
  }
  const RocCurve roc = evaluate_roc(scores, labels);
  fs::path curve = args.curve_out;
  if (curve.empty() && !cfg.paths.output.empty()) curve = fs::path(cfg.paths.output) / "roc.csv";
  if (!curve.empty()) {
    if (curve.has_parent_path()) ensure_dir(curve.parent_path());
    std::ofstream out(curve);
    if (!out) throw IoError("cannot write " + curve.string());
    out << "fpr,tpr,threshold\n";
    out.precision(17);
    for (std::size_t i = 0; i < roc.fpr.size(); ++i) {
      out << roc.fpr[i] << ',' << roc.tpr[i] << ',' << roc.thresholds[i] << '\n';
    }
  }
  json summary = {{"auc", roc.auc}, {"samples", rows.size()}, {"points", roc.fpr.size()}};
  if (!curve.empty()) summary["curve"] = curve.string();
  std::cout << summary.dump() << std::endl;
  return 0;
}

int cmd_eval_masks(const RunConfig&, const EvalMasksArgs& args) {
  const fs::path pred_dir = require_existing(args.pred_dir, "prediction directory (--pred)");
  const GroundTruthSet truth = load_ground_truth(require_existing(args.truth_dir, "ground truth (--truth)"));
  for (const auto& w : truth.warnings) std::cerr << "[rsf] warning: " << w << std::endl;
  json per_image = json::array();
  std::vector<double> ious;
  std::vector<double> f1s;
  for (const auto& entry : truth.entries) {
    const fs::path pred_path = pred_dir / (entry.name + ".png");
    if (!fs::exists(pred_path)) {
      std::cerr << "[rsf] warning: no prediction for " << entry.name << std::endl;
      continue;
    }
    const BinaryMask pred = BinaryMask::from_plane(load_image(pred_path), 0.5);
    const double i = iou(pred, entry.mask);
    const double f = pixel_f1(pred, entry.mask);
    ious.push_back(i);
    f1s.push_back(f);
    per_image.push_back({{"name", entry.name}, {"iou", i}, {"f1", f}});
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  std::cout << json{{"images", per_image},
                    {"mean_iou", mean(ious)},
                    {"mean_f1", mean(f1s)},
                    {"evaluated", ious.size()}}
                   .dump()
            << std::endl;
  return 0;
}

int cmd_detect(const RunConfig& cfg, const DetectArgs& args) {
  const fs::path image_path = require_existing(args.image, "image");
  const fs::path model_dir = require_existing(cfg.paths.models, "model directory (--models)");
  const fs::path out = require_path(cfg.paths.output, "output directory (--out)");
  std::vector<MlpModel> models;
  for (const auto name : kChannelNames) {
    const fs::path p = model_dir / (std::string(name) + ".rsnn");
    if (!fs::exists(p)) throw ConfigError("missing model file " + p.string());
    models.push_back(load_mlp(p));
  }
  const ImageBuffer img = load_image(image_path);
  const DetectConfig dc = cfg.detect_config();
  const DetectionResult r = detect(img, models, dc);
  ensure_dir(out);
  write_detection_images(out, r);

  json report = detection_report(r, dc);
  report["image"] = fs::absolute(image_path).string();
  report["width"] = img.width();
  report["height"] = img.height();
  if (!args.lstm_model.empty()) {
    const fs::path lp = require_existing(args.lstm_model, "LSTM model (--lstm)");
    const LstmModel lm = load_lstm(lp);
    LstmDetectConfig lc;
    lc.patch_size = lm.arch.patch_size;
    lc.stride = cfg.stride;
    lc.pmap_sigma = cfg.features.pmap_sigma;
    std::ifstream side(sidecar_path(lp));
    if (side) {
      const json meta = json::parse(side, nullptr, false);
      if (meta.is_object() && meta.contains("input")) {
        lc.input = lstm_input_from_string(meta["input"].get<std::string>());
      }
      if (meta.is_object() && meta.contains("pmap_sigma")) lc.pmap_sigma = meta["pmap_sigma"].get<double>();
    }
    const Plane prob = lstm_detect(img, lm, lc);
    save_png(out / "lstm_probability.png", prob);
    report["lstm"] = {{"model", lp.string()},
                      {"grid", {{"rows", prob.height()}, {"cols", prob.width()}}},
                      {"mean_probability", prob.mean()},
                      {"max_probability", prob.max()}};
  }
  report["config"] = to_json(cfg);
  write_json(out / "report.json", report);
  std::cout << json{{"confidence_score", r.confidence},
                    {"selected_channels", report["selected_channels"]},
                    {"report", (out / "report.json").string()}}
                   .dump()
            << std::endl;
  return 0;
}

int cmd_report(const RunConfig& cfg, const ReportArgs& args) {
  const fs::path out = require_path(cfg.paths.output, "output directory (--out)");
  if (args.detect_dir.empty() && args.roc_csvs.empty()) {
    throw ConfigError("report needs --detect and/or --roc inputs");
  }
  ensure_dir(out);
  json summary = json::object();
  if (!args.detect_dir.empty()) {
    summary["detect"] = render_detection_panel(require_existing(args.detect_dir, "detect directory"),
                                               out / "panel.png");
  }
  if (!args.roc_csvs.empty()) {
    std::vector<NamedCurve> curves;
    for (const auto& f : args.roc_csvs) {
      const auto rows = read_scores_csv(require_existing(f, "scores file (--roc)"));
      std::vector<double> s;
      std::vector<int> l;
      for (const auto& [a, b] : rows) {
        s.push_back(a);
        l.push_back(b);
      }
      curves.push_back({fs::path(f).stem().string(), evaluate_roc(s, l)});
    }
    render_roc_plot(curves, out / "roc.png");
    json rocs = json::array();
    for (const auto& c : curves) rocs.push_back({{"name", c.name}, {"auc", c.roc.auc}});
    summary["roc"] = rocs;
  }
  summary["config"] = to_json(cfg);
  write_json(out / "summary.json", summary);
  std::cout << summary.dump() << std::endl;
  return 0;
}

}  // namespace rsf::cli
