#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace rsf::cli {

struct DatasetBuildArgs {
  std::string task;
  int n = 1000;
  bool clean = false;  // no extra transforms, no JPEG
};

struct SynthSourcesArgs {
  int count = 40;
  int size = 384;
};

struct TrainArgs {
  std::string task;        // mlp: one of the six channels
  int n = 2500;            // patches generated when no dataset is given
  std::string input;       // lstm: fast | em | raw (defaults to features.pmap)
  std::string model_out;
};

struct EvalRocArgs {
  std::string scores_csv;
  std::string curve_out;
};

struct EvalMasksArgs {
  std::string pred_dir;
  std::string truth_dir;
};

struct DetectArgs {
  std::string image;
  std::string lstm_model;
};

struct ReportArgs {
  std::string detect_dir;
  std::vector<std::string> roc_csvs;
};

int cmd_dataset_build(const RunConfig& cfg, const DatasetBuildArgs& args);
int cmd_dataset_synth(const RunConfig& cfg, const SynthSourcesArgs& args);
int cmd_train_mlp(const RunConfig& cfg, const TrainArgs& args);
int cmd_train_lstm(const RunConfig& cfg, const TrainArgs& args);
int cmd_eval_roc(const RunConfig& cfg, const EvalRocArgs& args);
int cmd_eval_masks(const RunConfig& cfg, const EvalMasksArgs& args);
int cmd_detect(const RunConfig& cfg, const DetectArgs& args);
int cmd_report(const RunConfig& cfg, const ReportArgs& args);

/// Prints the resolved configuration to stderr.
void log_config(const RunConfig& cfg, const std::string& command);

}  // namespace rsf::cli
