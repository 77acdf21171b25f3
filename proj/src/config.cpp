#include "bdparse/config.hpp"

#include <fstream>

#include "bdparse/assets.hpp"
#include "bdparse/errors.hpp"

namespace bdparse {

using nlohmann::json;

PreprocessConfig preprocess_config_from_json(const json& root, PreprocessConfig base) {
    if (!root.contains("preprocess")) return base;
    const auto& section = root.at("preprocess");
    try {
        if (section.contains("split_punct")) base.split_punct = section.at("split_punct").get<std::string>();
        if (section.contains("placeholder")) base.placeholder = section.at("placeholder").get<std::string>();
        if (section.contains("variable_patterns")) {
            base.variable_patterns.clear();
            for (const auto& p : section.at("variable_patterns")) {
                base.variable_patterns.push_back({p.at("name").get<std::string>(), p.at("regex").get<std::string>()});
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("preprocess section: ") + e.what());
    }
    return base;
}

AppConfig app_config_from_json(const json& root, AppConfig base) {
    base.preprocess = preprocess_config_from_json(root, std::move(base.preprocess));
    try {
        if (root.contains("matching")) {
            const auto& m = root.at("matching");
            if (m.contains("similarity_threshold")) {
                base.similarity_threshold = m.at("similarity_threshold").get<double>();
            }
            if (m.contains("top_k")) {
                const auto& k = m.at("top_k");
                base.top_k = k.is_null() ? std::nullopt : std::optional<std::size_t>(k.get<std::size_t>());
            }
        }
        if (root.contains("llm")) {
            const auto& l = root.at("llm");
            auto& c = base.llm;
            c.endpoint = l.value("endpoint", c.endpoint);
            c.model = l.value("model", c.model);
            c.temperature = l.value("temperature", c.temperature);
            c.timeout_seconds = l.value("timeout_seconds", c.timeout_seconds);
            c.max_retries = l.value("max_retries", c.max_retries);
            c.api_key_env = l.value("api_key_env", c.api_key_env);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration: ") + e.what());
    }
    if (base.similarity_threshold < 0.0 || base.similarity_threshold > 1.0) {
        throw ConfigError("matching.similarity_threshold must be in [0, 1]");
    }
    if (base.llm.temperature != 0.0) throw ConfigError("llm.temperature must be 0 for reproducible runs");
    if (base.llm.max_retries < 0) throw ConfigError("llm.max_retries must be >= 0");
    return base;
}

AppConfig default_app_config() {
    static const AppConfig defaults = [] {
        AppConfig base;
        base.preprocess.split_punct.clear();
        return app_config_from_json(json::parse(assets::default_config()), base);
    }();
    return defaults;
}

AppConfig load_app_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return app_config_from_json(root, default_app_config());
}

}  // namespace bdparse
