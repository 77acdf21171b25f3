#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bdparse/model.hpp"

namespace bdparse {

struct VariablePattern {
    std::string name;
    /// Must match an entire token.
    std::string regex;
};

struct PreprocessConfig {
    /// Characters emitted as standalone tokens.
    std::string split_punct;
    std::vector<VariablePattern> variable_patterns;
    std::string placeholder{kPlaceholder};
};

/// Defaults from the shipped default-config asset.
PreprocessConfig default_preprocess_config();

/// Tokenizer plus variable masker. Regexes are compiled once on construction;
/// afterwards the object is immutable and safe to share between threads.
class Preprocessor {
public:
    /// Throws ConfigError on an invalid regex or an alphanumeric split character.
    explicit Preprocessor(PreprocessConfig cfg = default_preprocess_config());
    ~Preprocessor();
    Preprocessor(Preprocessor&&) noexcept;
    Preprocessor& operator=(Preprocessor&&) noexcept;

    const PreprocessConfig& config() const { return cfg_; }

    bool is_variable(std::string_view token) const;

    /// Replaces every token that fully matches a variable pattern with the placeholder.
    std::vector<std::string> mask_variables(std::vector<std::string> tokens) const;

    /// Whitespace split, mask, punctuation split, mask again.
    /// Throws EmptyLineError for blank input.
    TokenSeq tokenize(std::string_view raw) const;

private:
    struct Impl;
    PreprocessConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace bdparse
