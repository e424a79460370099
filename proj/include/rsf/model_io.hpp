#pragma once

#include <filesystem>
#include <string>

#include "rsf/lstm.hpp"
#include "rsf/mlp.hpp"
#include "json.hpp"

namespace rsf {

// Binary layout: "RSNN", u32 version, u32 kind (1 = MLP, 2 = LSTM), u32 n,
// n × u32 architecture words, then each parameter block as u64 count followed
// by count little-endian float64 values. A JSON sidecar `<path>.json` carries
// the same architecture plus whatever metadata the caller supplies.

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

void save_mlp(const std::filesystem::path& path, const MlpModel& model,
              const nlohmann::json& metadata = nlohmann::json::object());
MlpModel load_mlp(const std::filesystem::path& path);

void save_lstm(const std::filesystem::path& path, const LstmModel& model,
               const nlohmann::json& metadata = nlohmann::json::object());
LstmModel load_lstm(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& model_path);

}  // namespace rsf
