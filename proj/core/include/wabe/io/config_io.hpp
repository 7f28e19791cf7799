#pragma once

#include "wabe/trainer/trainer.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace wabe {

/// A training configuration document plus the scene it refers to. A relative
/// scene path is resolved against the configuration file's directory.
struct TrainConfigFile {
  TrainConfig config;
  std::string scene;
};

/// Every field is optional and falls back to the TrainConfig default; unknown
/// fields are rejected.
TrainConfigFile parse_train_config(std::string_view text, const std::string& origin = "<memory>");
std::string serialize_train_config(const TrainConfigFile& file);

TrainConfigFile load_train_config(const std::filesystem::path& path);
void save_train_config(const TrainConfigFile& file, const std::filesystem::path& path);

}  // namespace wabe
