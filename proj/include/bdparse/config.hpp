#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "json.hpp"

#include "bdparse/llm_client.hpp"
#include "bdparse/preprocess.hpp"

namespace bdparse {

/// Everything read from a configuration file; unspecified keys keep the
/// shipped defaults.
struct AppConfig {
    PreprocessConfig preprocess;
    llm::LlmConfig llm;
    double similarity_threshold = 0.5;
    std::optional<std::size_t> top_k;
};

AppConfig default_app_config();

/// Overlays the JSON file on the defaults. Throws ConfigError on unreadable
/// files, malformed JSON or wrongly typed keys.
AppConfig load_app_config(const std::filesystem::path& path);

AppConfig app_config_from_json(const nlohmann::json& root, AppConfig base);
PreprocessConfig preprocess_config_from_json(const nlohmann::json& root, PreprocessConfig base);

}  // namespace bdparse
