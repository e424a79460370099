#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rsf/errors.hpp"
#include "rsf/parallel.hpp"

using namespace rsf::cli;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string config;
  std::optional<int> patch_size;
  std::optional<int> stride;
  std::optional<std::string> interp;
  std::optional<std::string> pmap;
  std::optional<double> pmap_sigma;
};

struct PathFlags {
  std::string sources;
  std::string data;
  std::string models;
  std::string output;
};

RunConfig resolve(const GlobalFlags& g, const PathFlags& p) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  if (g.patch_size) cfg.patch_size = *g.patch_size;
  if (g.stride) cfg.stride = *g.stride;
  if (g.interp) cfg.interp = *g.interp;
  if (g.pmap) cfg.features.pmap = *g.pmap;
  if (g.pmap_sigma) cfg.features.pmap_sigma = *g.pmap_sigma;
  if (!p.sources.empty()) cfg.paths.sources = p.sources;
  if (!p.data.empty()) cfg.paths.data = p.data;
  if (!p.models.empty()) cfg.paths.models = p.models;
  if (!p.output.empty()) cfg.paths.output = p.output;
  cfg.validate();
  if (cfg.threads > 0) rsf::set_thread_count(cfg.threads);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resampling forensics: patch datasets, classifiers and forgery localization"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  PathFlags paths;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = RESAMPLE_FORENSICS_THREADS or hardware)");
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--patch-size", g.patch_size, "Patch side in pixels");
  app.add_option("--stride", g.stride, "Heatmap stride in pixels");
  app.add_option("--interp", g.interp, "bilinear | bicubic");
  app.add_option("--pmap", g.pmap, "fast | em");
  app.add_option("--pmap-sigma", g.pmap_sigma, "Fast p-map residual scale");

  std::function<int(const RunConfig&)> action;
  std::string command;

  auto* dataset = app.add_subcommand("dataset", "Build patch datasets");
  dataset->require_subcommand(1);
  dataset->fallthrough();

  DatasetBuildArgs build_args;
  auto* build = dataset->add_subcommand("build", "Generate labeled patches from source images");
  build->add_option("--task", build_args.task, "Channel name or 'splice'")->required();
  build->add_option("--n", build_args.n, "Number of patches");
  build->add_option("--src", paths.sources, "Source image directory");
  build->add_option("--out", paths.output, "Output dataset directory");
  build->add_flag("--clean", build_args.clean, "No extra transforms or JPEG in the chains");
  build->callback([&] {
    command = "dataset build";
    action = [&](const RunConfig& c) { return cmd_dataset_build(c, build_args); };
  });

  SynthSourcesArgs synth_args;
  auto* synth = dataset->add_subcommand("synth-sources", "Write synthetic raw source images");
  synth->add_option("--count", synth_args.count, "Number of images");
  synth->add_option("--size", synth_args.size, "Image side in pixels");
  synth->add_option("--out", paths.output, "Output directory");
  synth->callback([&] {
    command = "dataset synth-sources";
    action = [&](const RunConfig& c) { return cmd_dataset_synth(c, synth_args); };
  });

  auto* train = app.add_subcommand("train", "Train classifiers");
  train->require_subcommand(1);
  train->fallthrough();

  TrainArgs mlp_args;
  auto* mlp = train->add_subcommand("mlp", "Train one detector channel");
  mlp->add_option("--task", mlp_args.task, "Channel name")->required();
  mlp->add_option("--n", mlp_args.n, "Patches to generate when --data is absent");
  mlp->add_option("--data", paths.data, "Dataset directory");
  mlp->add_option("--src", paths.sources, "Source image directory");
  mlp->add_option("--models", paths.models, "Model directory (writes <task>.rsnn)");
  mlp->add_option("--out", mlp_args.model_out, "Model file");
  mlp->callback([&] {
    command = "train mlp";
    action = [&](const RunConfig& c) { return cmd_train_mlp(c, mlp_args); };
  });

  TrainArgs lstm_args;
  auto* lstm = train->add_subcommand("lstm", "Train the patch LSTM classifier");
  lstm->add_option("--task", lstm_args.task, "Dataset task (default splice)");
  lstm->add_option("--input", lstm_args.input, "fast | em | raw");
  lstm->add_option("--n", lstm_args.n, "Patches to generate when --data is absent");
  lstm->add_option("--data", paths.data, "Dataset directory");
  lstm->add_option("--src", paths.sources, "Source image directory");
  lstm->add_option("--models", paths.models, "Model directory (writes lstm.rsnn)");
  lstm->add_option("--out", lstm_args.model_out, "Model file");
  lstm->callback([&] {
    command = "train lstm";
    action = [&](const RunConfig& c) { return cmd_train_lstm(c, lstm_args); };
  });

  auto* eval = app.add_subcommand("eval", "Evaluate scores and masks");
  eval->require_subcommand(1);
  eval->fallthrough();

  EvalRocArgs roc_args;
  auto* roc = eval->add_subcommand("roc", "ROC curve and AUC from a score,label CSV");
  roc->add_option("--scores", roc_args.scores_csv, "CSV of score,label rows")->required();
  roc->add_option("--out", roc_args.curve_out, "Curve CSV (fpr,tpr,threshold)");
  roc->callback([&] {
    command = "eval roc";
    action = [&](const RunConfig& c) { return cmd_eval_roc(c, roc_args); };
  });

  EvalMasksArgs masks_args;
  auto* masks = eval->add_subcommand("masks", "IoU and F1 of predicted masks");
  masks->add_option("--pred", masks_args.pred_dir, "Directory of <name>.png predictions")->required();
  masks->add_option("--truth", masks_args.truth_dir, "Ground truth directory")->required();
  masks->callback([&] {
    command = "eval masks";
    action = [&](const RunConfig& c) { return cmd_eval_masks(c, masks_args); };
  });

  DetectArgs detect_args;
  auto* det = app.add_subcommand("detect", "Localize resampled regions in an image");
  det->fallthrough();
  det->add_option("image", detect_args.image, "Input image")->required();
  det->add_option("--models", paths.models, "Directory holding <channel>.rsnn");
  det->add_option("--out", paths.output, "Output directory");
  det->add_option("--lstm", detect_args.lstm_model, "Optional LSTM model for a second heatmap");
  det->callback([&] {
    command = "detect";
    action = [&](const RunConfig& c) { return cmd_detect(c, detect_args); };
  });

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "Render figures and a summary");
  rep->fallthrough();
  rep->add_option("--detect", report_args.detect_dir, "detect output directory");
  rep->add_option("--roc", report_args.roc_csvs, "score,label CSV files")->expected(1, -1);
  rep->add_option("--out", paths.output, "Output directory");
  rep->callback([&] {
    command = "report";
    action = [&](const RunConfig& c) { return cmd_report(c, report_args); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve(g, paths);
    log_config(cfg, command);
    return action(cfg);
  } catch (const rsf::InputError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
