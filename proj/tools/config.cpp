#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rsf/model_io.hpp"

namespace rsf::cli {

namespace {

using nlohmann::json;

// Collects per-field problems so a bad file is reported in one pass.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

  template <typename T>
  void read(const json& obj, const std::string& prefix, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(prefix + key + ": expected " + type_name<T>() + ", got " +
                        obj.at(key).dump());
    }
  }

  void check_keys(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
    if (!obj.is_object()) {
      errors_.push_back((prefix.empty() ? std::string("config") : prefix.substr(0, prefix.size() - 1)) +
                        ": expected an object");
      return;
    }
    for (const auto& item : obj.items()) {
      if (!known.count(item.key())) errors_.push_back(prefix + item.key() + ": unknown field");
    }
  }

 private:
  template <typename T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else return "a number";
  }

  std::vector<std::string>& errors_;
};

[[noreturn]] void fail(const std::vector<std::string>& errors) {
  std::ostringstream msg;
  msg << "invalid configuration:";
  for (const auto& e : errors) msg << "\n  " << e;
  throw ConfigError(msg.str());
}

// The training seed is derived from the master seed, so it is not a field.
json train_json(const TrainConfig& t) {
  json j = to_json(t);
  j.erase("seed");
  return j;
}

}  // namespace

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> e;
  if (threads < 0) e.push_back("threads: must be ≥ 0");
  if (patch_size < 16) e.push_back("patch_size: must be ≥ 16");
  if (patch_size % 8 != 0) e.push_back("patch_size: must be a multiple of 8");
  if (stride < 1) e.push_back("stride: must be ≥ 1");
  if (interp != "bilinear" && interp != "bicubic") e.push_back("interp: must be bilinear or bicubic");
  if (features.angles < 1 || features.angles > 180) e.push_back("features.angles: must lie in [1,180]");
  if (features.pmap != "fast" && features.pmap != "em") e.push_back("features.pmap: must be fast or em");
  if (!(features.pmap_sigma > 0.0)) e.push_back("features.pmap_sigma: must be > 0");
  if (!(segmentation.sigma_s > 0.0)) e.push_back("segmentation.sigma_s: must be > 0");
  if (!(segmentation.sigma_r > 0.0)) e.push_back("segmentation.sigma_r: must be > 0");
  if (!(segmentation.beta > 0.0)) e.push_back("segmentation.beta: must be > 0");
  if (!(segmentation.eta_min >= 0.0 && segmentation.eta_min <= 1.0)) {
    e.push_back("segmentation.eta_min: must lie in [0,1]");
  }
  if (!(segmentation.mass_min >= 0.0 && segmentation.mass_min <= 0.5)) {
    e.push_back("segmentation.mass_min: must lie in [0,0.5]");
  }
  if (!(segmentation.mode_min >= 0.0 && segmentation.mode_min <= 1.0)) {
    e.push_back("segmentation.mode_min: must lie in [0,1]");
  }
  if (!(train.learning_rate >= 0.0)) e.push_back("train.learning_rate: must be ≥ 0");
  if (train.batch_size < 1) e.push_back("train.batch_size: must be ≥ 1");
  if (train.epochs < 0) e.push_back("train.epochs: must be ≥ 0");
  if (!(train.weight_decay >= 0.0)) e.push_back("train.weight_decay: must be ≥ 0");
  if (!(train.beta1 >= 0.0 && train.beta1 < 1.0)) e.push_back("train.beta1: must lie in [0,1)");
  if (!(train.beta2 >= 0.0 && train.beta2 < 1.0)) e.push_back("train.beta2: must lie in [0,1)");
  if (!(train.adam_eps > 0.0)) e.push_back("train.adam_eps: must be > 0");
  if (lstm.hidden < 1) e.push_back("lstm.hidden: must be ≥ 1");
  if (lstm.layers < 1) e.push_back("lstm.layers: must be ≥ 1");
  if (lstm.conv_filters < 1) e.push_back("lstm.conv_filters: must be ≥ 1");
  if (lstm.block_size < 1 || patch_size % lstm.block_size != 0) {
    e.push_back("lstm.block_size: must divide patch_size");
  }
  for (const auto& [name, value] : {std::pair{"paths.sources", paths.sources},
                                    std::pair{"paths.data", paths.data}}) {
    if (!value.empty() && !std::filesystem::exists(value)) {
      e.push_back(std::string(name) + ": '" + value + "' does not exist");
    }
  }
  return e;
}

void RunConfig::validate() const {
  const auto e = problems();
  if (!e.empty()) fail(e);
}

Interpolation RunConfig::interpolation() const {
  return interp == "bicubic" ? Interpolation::Bicubic : Interpolation::Bilinear;
}

DetectConfig RunConfig::detect_config() const {
  DetectConfig d;
  d.patch_size = patch_size;
  d.stride = stride;
  d.angles = features.angles;
  d.sigma_s = segmentation.sigma_s;
  d.sigma_r = segmentation.sigma_r;
  d.walker.beta = segmentation.beta;
  d.select.eta_min = segmentation.eta_min;
  d.select.mass_min = segmentation.mass_min;
  d.select.mode_min = segmentation.mode_min;
  return d;
}

LstmArch RunConfig::lstm_arch() const {
  LstmArch a;
  a.patch_size = patch_size;
  a.block_size = lstm.block_size;
  a.hidden = lstm.hidden;
  a.layers = lstm.layers;
  a.conv_filters = lstm.conv_filters;
  return a;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"threads", c.threads},
          {"paths",
           {{"sources", c.paths.sources},
            {"data", c.paths.data},
            {"models", c.paths.models},
            {"output", c.paths.output}}},
          {"patch_size", c.patch_size},
          {"stride", c.stride},
          {"interp", c.interp},
          {"features",
           {{"angles", c.features.angles},
            {"pmap", c.features.pmap},
            {"pmap_sigma", c.features.pmap_sigma}}},
          {"segmentation",
           {{"sigma_s", c.segmentation.sigma_s},
            {"sigma_r", c.segmentation.sigma_r},
            {"beta", c.segmentation.beta},
            {"eta_min", c.segmentation.eta_min},
            {"mass_min", c.segmentation.mass_min},
            {"mode_min", c.segmentation.mode_min}}},
          {"train", train_json(c.train)},
          {"lstm",
           {{"hidden", c.lstm.hidden},
            {"layers", c.lstm.layers},
            {"conv_filters", c.lstm.conv_filters},
            {"block_size", c.lstm.block_size}}}};
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
  std::vector<std::string> errors;
  FieldReader r(errors);
  r.check_keys(j, "", {"seed", "threads", "paths", "patch_size", "stride", "interp", "features",
                       "segmentation", "train", "lstm"});
  if (!j.is_object()) fail(errors);
  r.read(j, "", "seed", c.seed);
  r.read(j, "", "threads", c.threads);
  r.read(j, "", "patch_size", c.patch_size);
  r.read(j, "", "stride", c.stride);
  r.read(j, "", "interp", c.interp);
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    r.check_keys(p, "paths.", {"sources", "data", "models", "output"});
    if (p.is_object()) {
      r.read(p, "paths.", "sources", c.paths.sources);
      r.read(p, "paths.", "data", c.paths.data);
      r.read(p, "paths.", "models", c.paths.models);
      r.read(p, "paths.", "output", c.paths.output);
    }
  }
  if (j.contains("features")) {
    const auto& f = j["features"];
    r.check_keys(f, "features.", {"angles", "pmap", "pmap_sigma"});
    if (f.is_object()) {
      r.read(f, "features.", "angles", c.features.angles);
      r.read(f, "features.", "pmap", c.features.pmap);
      r.read(f, "features.", "pmap_sigma", c.features.pmap_sigma);
    }
  }
  if (j.contains("segmentation")) {
    const auto& s = j["segmentation"];
    r.check_keys(s, "segmentation.", {"sigma_s", "sigma_r", "beta", "eta_min", "mass_min", "mode_min"});
    if (s.is_object()) {
      r.read(s, "segmentation.", "sigma_s", c.segmentation.sigma_s);
      r.read(s, "segmentation.", "sigma_r", c.segmentation.sigma_r);
      r.read(s, "segmentation.", "beta", c.segmentation.beta);
      r.read(s, "segmentation.", "eta_min", c.segmentation.eta_min);
      r.read(s, "segmentation.", "mass_min", c.segmentation.mass_min);
      r.read(s, "segmentation.", "mode_min", c.segmentation.mode_min);
    }
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    r.check_keys(t, "train.", {"learning_rate", "batch_size", "epochs", "beta1", "beta2",
                               "adam_eps", "weight_decay"});
    if (t.is_object()) {
      r.read(t, "train.", "learning_rate", c.train.learning_rate);
      r.read(t, "train.", "batch_size", c.train.batch_size);
      r.read(t, "train.", "epochs", c.train.epochs);
      r.read(t, "train.", "beta1", c.train.beta1);
      r.read(t, "train.", "beta2", c.train.beta2);
      r.read(t, "train.", "adam_eps", c.train.adam_eps);
      r.read(t, "train.", "weight_decay", c.train.weight_decay);
    }
  }
  if (j.contains("lstm")) {
    const auto& l = j["lstm"];
    r.check_keys(l, "lstm.", {"hidden", "layers", "conv_filters", "block_size"});
    if (l.is_object()) {
      r.read(l, "lstm.", "hidden", c.lstm.hidden);
      r.read(l, "lstm.", "layers", c.lstm.layers);
      r.read(l, "lstm.", "conv_filters", c.lstm.conv_filters);
      r.read(l, "lstm.", "block_size", c.lstm.block_size);
    }
  }
  if (!errors.empty()) {
    for (auto& e : c.problems()) errors.push_back(std::move(e));
    fail(errors);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace rsf::cli
