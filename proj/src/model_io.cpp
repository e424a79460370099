#include "rsf/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "rsf/errors.hpp"

namespace rsf {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindMlp = 1;
constexpr std::uint32_t kKindLstm = 2;

template <typename T>
void put(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("truncated model file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_block(std::ostream& os, const double* data, std::size_t n) {
  put<std::uint64_t>(os, n);
  for (std::size_t i = 0; i < n; ++i) put<double>(os, data[i]);
}

void get_block(std::istream& is, double* data, std::size_t n, const std::string& name) {
  const auto count = get<std::uint64_t>(is);
  if (count != n) {
    throw FormatError("parameter block '" + name + "' has " + std::to_string(count) +
                      " values, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) data[i] = get<double>(is);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::uint32_t expected_kind) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open model file " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + " is not a model file");
  }
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw FormatError("unsupported model version " + std::to_string(version));
  const auto kind = get<std::uint32_t>(is);
  if (kind != expected_kind) throw FormatError(path.string() + " holds a different model kind");
  return is;
}

void write_sidecar(const std::filesystem::path& path, nlohmann::json j) {
  std::ofstream os(sidecar_path(path));
  if (!os) throw IoError("cannot write sidecar for " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& model_path) {
  return model_path.string() + ".json";
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate}, {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},               {"seed", cfg.seed},
          {"beta1", cfg.beta1},                 {"beta2", cfg.beta2},
          {"adam_eps", cfg.adam_eps},           {"weight_decay", cfg.weight_decay}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
  cfg.adam_eps = j.value("adam_eps", cfg.adam_eps);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.validate();
  return cfg;
}

void save_mlp(const std::filesystem::path& path, const MlpModel& model,
              const nlohmann::json& metadata) {
  model.validate();
  const std::vector<int> sizes = model.sizes();
  {
    std::ofstream os = open_out(path);
    put<std::uint32_t>(os, kKindMlp);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(sizes.size()));
    for (int s : sizes) put<std::uint32_t>(os, static_cast<std::uint32_t>(s));
    put_block(os, model.input_shift.data(), static_cast<std::size_t>(model.input_shift.size()));
    put_block(os, model.input_scale.data(), static_cast<std::size_t>(model.input_scale.size()));
    for (const auto& l : model.layers) {
      put_block(os, l.weights.data(), static_cast<std::size_t>(l.weights.size()));
      put_block(os, l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
    if (!os) throw IoError("failed writing " + path.string());
  }
  nlohmann::json j = metadata;
  j["format"] = "RSNN";
  j["version"] = kVersion;
  j["kind"] = "mlp";
  j["layer_sizes"] = sizes;
  j["hidden_activation"] = "relu";
  j["output_activation"] = "logistic";
  write_sidecar(path, j);
}

MlpModel load_mlp(const std::filesystem::path& path) {
  std::ifstream is = open_in(path, kKindMlp);
  const auto n = get<std::uint32_t>(is);
  if (n < 2 || n > 64) throw FormatError("implausible MLP layer count");
  std::vector<int> sizes(n);
  for (auto& s : sizes) s = static_cast<int>(get<std::uint32_t>(is));
  MlpModel model(sizes);
  get_block(is, model.input_shift.data(), static_cast<std::size_t>(model.input_shift.size()),
            "input_shift");
  get_block(is, model.input_scale.data(), static_cast<std::size_t>(model.input_scale.size()),
            "input_scale");
  for (auto& p : model.params()) get_block(is, p.data, p.size, p.name);
  model.validate();
  return model;
}

void save_lstm(const std::filesystem::path& path, const LstmModel& model,
               const nlohmann::json& metadata) {
  model.validate();
  const LstmArch& a = model.arch;
  {
    std::ofstream os = open_out(path);
    put<std::uint32_t>(os, kKindLstm);
    const std::uint32_t words[] = {static_cast<std::uint32_t>(a.patch_size),
                                   static_cast<std::uint32_t>(a.block_size),
                                   static_cast<std::uint32_t>(a.hidden),
                                   static_cast<std::uint32_t>(a.layers),
                                   static_cast<std::uint32_t>(a.conv_filters),
                                   static_cast<std::uint32_t>(a.classes)};
    put<std::uint32_t>(os, 6);
    for (auto w : words) put<std::uint32_t>(os, w);
    LstmModel copy = model;
    for (const auto& p : copy.params()) put_block(os, p.data, p.size);
    if (!os) throw IoError("failed writing " + path.string());
  }
  nlohmann::json j = metadata;
  j["format"] = "RSNN";
  j["version"] = kVersion;
  j["kind"] = "lstm";
  j["architecture"] = {{"patch_size", a.patch_size}, {"block_size", a.block_size},
                       {"hidden", a.hidden},         {"layers", a.layers},
                       {"conv_filters", a.conv_filters}, {"classes", a.classes}};
  write_sidecar(path, j);
}

LstmModel load_lstm(const std::filesystem::path& path) {
  std::ifstream is = open_in(path, kKindLstm);
  if (get<std::uint32_t>(is) != 6) throw FormatError("unexpected LSTM architecture descriptor");
  LstmArch a;
  a.patch_size = static_cast<int>(get<std::uint32_t>(is));
  a.block_size = static_cast<int>(get<std::uint32_t>(is));
  a.hidden = static_cast<int>(get<std::uint32_t>(is));
  a.layers = static_cast<int>(get<std::uint32_t>(is));
  a.conv_filters = static_cast<int>(get<std::uint32_t>(is));
  a.classes = static_cast<int>(get<std::uint32_t>(is));
  LstmModel model = LstmModel::zeros(a);
  for (auto& p : model.params()) get_block(is, p.data, p.size, p.name);
  model.validate();
  return model;
}

}  // namespace rsf
