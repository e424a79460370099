#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsf/errors.hpp"
#include "rsf/imaging.hpp"
#include "rsf/lstm.hpp"
#include "rsf/nnet.hpp"
#include "rsf/pipeline.hpp"

namespace rsf::cli {

// A malformed configuration; the message lists every offending field.
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

struct Paths {
  std::string sources;
  std::string data;
  std::string models;
  std::string output;
};

struct FeatureSettings {
  int angles = 8;
  std::string pmap = "fast";  // fast | em
  double pmap_sigma = kDefaultPmapSigma;
};

struct SegmentationSettings {
  double sigma_s = 2.0;
  double sigma_r = 0.1;
  double beta = 90.0;
  double eta_min = ChannelSelectRule{}.eta_min;
  double mass_min = ChannelSelectRule{}.mass_min;
  double mode_min = ChannelSelectRule{}.mode_min;
};

struct LstmSettings {
  int hidden = 256;
  int layers = 3;
  int conv_filters = 8;
  int block_size = 8;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = environment or hardware default
  Paths paths;
  int patch_size = 64;
  int stride = 8;
  std::string interp = "bilinear";
  FeatureSettings features;
  SegmentationSettings segmentation;
  TrainConfig train;
  LstmSettings lstm;

  /// One message per field outside its documented range.
  std::vector<std::string> problems() const;
  /// Throws ConfigError listing every problem.
  void validate() const;

  Interpolation interpolation() const;
  DetectConfig detect_config() const;
  LstmArch lstm_arch() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Fields absent from `j` keep the values already in `base`; unknown fields
/// and type mismatches are reported together.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace rsf::cli
