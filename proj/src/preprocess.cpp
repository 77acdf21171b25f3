#include "bdparse/preprocess.hpp"

#include <boost/regex.hpp>
#include <cctype>

#include "bdparse/config.hpp"
#include "bdparse/errors.hpp"

namespace bdparse {

struct Preprocessor::Impl {
    boost::regex combined;
    bool has_patterns = false;
    bool split[256] = {};
};

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

PreprocessConfig default_preprocess_config() {
    return default_app_config().preprocess;
}

Preprocessor::Preprocessor(PreprocessConfig cfg) : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {
    if (cfg_.placeholder.empty()) throw ConfigError("placeholder must be non-empty");
    for (char c : cfg_.split_punct) {
        if (std::isalnum(static_cast<unsigned char>(c)) || is_space(c)) {
            throw ConfigError(std::string("split_punct contains non-punctuation character '") + c + "'");
        }
        if (cfg_.placeholder.find(c) != std::string::npos) {
            throw ConfigError(std::string("split_punct character '") + c + "' occurs in the placeholder");
        }
        impl_->split[static_cast<unsigned char>(c)] = true;
    }

    std::string alternation;
    for (const auto& p : cfg_.variable_patterns) {
        try {
            boost::regex check(p.regex);
        } catch (const boost::regex_error& e) {
            throw ConfigError("invalid variable pattern '" + p.name + "': " + e.what());
        }
        if (!alternation.empty()) alternation += '|';
        alternation += "(?:" + p.regex + ")";
    }
    if (!alternation.empty()) {
        impl_->combined = boost::regex("(?:" + alternation + ")", boost::regex::perl | boost::regex::optimize);
        impl_->has_patterns = true;
    }
}

Preprocessor::~Preprocessor() = default;
Preprocessor::Preprocessor(Preprocessor&&) noexcept = default;
Preprocessor& Preprocessor::operator=(Preprocessor&&) noexcept = default;

bool Preprocessor::is_variable(std::string_view token) const {
    if (!impl_->has_patterns || token.empty() || token == cfg_.placeholder) return false;
    return boost::regex_match(token.begin(), token.end(), impl_->combined);
}

std::vector<std::string> Preprocessor::mask_variables(std::vector<std::string> tokens) const {
    for (auto& t : tokens) {
        if (is_variable(t)) t = cfg_.placeholder;
    }
    return tokens;
}

TokenSeq Preprocessor::tokenize(std::string_view raw) const {
    TokenSeq out;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        while (pos < raw.size() && is_space(raw[pos])) ++pos;
        if (pos >= raw.size()) break;
        std::size_t end = pos;
        while (end < raw.size() && !is_space(raw[end])) ++end;
        std::string_view word = raw.substr(pos, end - pos);
        pos = end;

        if (word == cfg_.placeholder || is_variable(word)) {
            out.tokens.push_back(cfg_.placeholder);
            out.joined.push_back(false);
            continue;
        }

        bool first_piece = true;
        auto emit = [&](std::string_view piece) {
            out.tokens.push_back(is_variable(piece) ? cfg_.placeholder : std::string(piece));
            out.joined.push_back(!first_piece);
            first_piece = false;
        };
        std::size_t start = 0;
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (impl_->split[static_cast<unsigned char>(word[i])]) {
                if (i > start) emit(word.substr(start, i - start));
                emit(word.substr(i, 1));
                start = i + 1;
            }
        }
        if (start < word.size()) emit(word.substr(start));
    }
    if (out.tokens.empty()) throw EmptyLineError();
    return out;
}

}  // namespace bdparse
