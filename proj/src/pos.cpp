#include "bdparse/pos.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "bdparse/assets.hpp"
#include "bdparse/errors.hpp"

namespace bdparse::pos {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_alpha(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c) != 0; });
}

}  // namespace

Lexicon Lexicon::parse(std::string_view text) {
    Lexicon lex;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw ConfigError("lexicon line " + std::to_string(line_no) + ": expected word<TAB>TAG");
        }
        auto word = trim(line.substr(0, tab));
        auto tag_name = trim(line.substr(tab + 1));
        auto tag = parse_pos_tag(tag_name);
        if (word.empty() || !tag) {
            throw ConfigError("lexicon line " + std::to_string(line_no) + ": bad entry '" +
                              std::string(line) + "'");
        }
        if (word.size() > 1 && word.front() == '-') {
            lex.add_suffix_rule(std::string(word.substr(1)), *tag);
        } else {
            lex.add(std::string(word), *tag);
        }
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open lexicon " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const Lexicon& Lexicon::builtin() {
    static const Lexicon lex = parse(assets::default_lexicon());
    return lex;
}

void Lexicon::add(std::string word, PosTag tag) { entries_[lowercase(word)] = tag; }

void Lexicon::add_suffix_rule(std::string suffix, PosTag tag) {
    suffix_rules_.emplace_back(lowercase(suffix), tag);
}

std::optional<PosTag> Lexicon::lookup(std::string_view word) const {
    auto it = entries_.find(lowercase(word));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<PosTag> Lexicon::suffix_tag(std::string_view word) const {
    const auto lower = lowercase(word);
    for (const auto& [suffix, tag] : suffix_rules_) {
        if (lower.size() <= suffix.size() || !lower.ends_with(suffix)) continue;
        auto stem = std::string_view(lower).substr(0, lower.size() - suffix.size());
        if (stem.size() >= 3 && is_alpha(stem)) return tag;
    }
    return std::nullopt;
}

bool is_numeric(std::string_view token) {
    if (!token.empty() && (token.front() == '-' || token.front() == '+')) token.remove_prefix(1);
    if (token.empty()) return false;
    bool digits = false;
    bool dot = false;
    for (char c : token) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            return false;
        }
    }
    return digits && token.back() != '.';
}

LexiconTagger::LexiconTagger(std::shared_ptr<const Lexicon> lexicon, std::string placeholder)
    : lexicon_(std::move(lexicon)), placeholder_(std::move(placeholder)) {}

PosTag LexiconTagger::tag(std::string_view token) const {
    if (token == placeholder_) return PosTag::SYM;
    if (!token.empty() &&
        std::none_of(token.begin(), token.end(), [](unsigned char c) { return std::isalnum(c) != 0; })) {
        return PosTag::PUNCT;
    }
    if (is_numeric(token)) return PosTag::NUM;
    if (auto t = lexicon_->lookup(token)) return *t;
    if (auto t = lexicon_->suffix_tag(token)) return *t;
    const bool capitalized = !token.empty() && std::isupper(static_cast<unsigned char>(token.front()));
    const bool has_digit =
        std::any_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
    if (capitalized || has_digit) return PosTag::PROPN;
    return PosTag::NOUN;
}

std::shared_ptr<const Tagger> default_tagger() {
    static const auto tagger = std::make_shared<const LexiconTagger>(
        std::shared_ptr<const Lexicon>(&Lexicon::builtin(), [](const Lexicon*) {}));
    return tagger;
}

}  // namespace bdparse::pos
