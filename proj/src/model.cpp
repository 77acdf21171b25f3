#include "bdparse/model.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "bdparse/errors.hpp"

namespace bdparse {

namespace {

constexpr std::array<std::pair<PosTag, std::string_view>, 12> kTagNames{{
    {PosTag::VERB, "VERB"},
    {PosTag::NOUN, "NOUN"},
    {PosTag::PROPN, "PROPN"},
    {PosTag::ADJ, "ADJ"},
    {PosTag::ADV, "ADV"},
    {PosTag::ADP, "ADP"},
    {PosTag::DET, "DET"},
    {PosTag::CONJ, "CONJ"},
    {PosTag::PUNCT, "PUNCT"},
    {PosTag::NUM, "NUM"},
    {PosTag::SYM, "SYM"},
    {PosTag::OTHER, "OTHER"},
}};

void require_same_length(std::size_t lhs, std::size_t rhs, const char* op) {
    if (lhs != rhs) {
        throw PreconditionError(std::string(op) + ": length mismatch (" + std::to_string(lhs) +
                                " vs " + std::to_string(rhs) + ")");
    }
}

}  // namespace

std::string_view to_string(PosTag tag) {
    for (const auto& [t, name] : kTagNames) {
        if (t == tag) return name;
    }
    return "OTHER";
}

std::optional<PosTag> parse_pos_tag(std::string_view name) {
    for (const auto& [t, n] : kTagNames) {
        if (n == name) return t;
    }
    return std::nullopt;
}

TemplateToken TemplateToken::constant(std::string text, std::optional<PosTag> pos) {
    if (text.empty()) throw PreconditionError("constant token must be non-empty");
    TemplateToken tok;
    tok.wildcard_ = false;
    tok.text_ = std::move(text);
    tok.pos_ = pos;
    return tok;
}

TemplateToken TemplateToken::from_text(std::string_view text) {
    if (text == kPlaceholder) return wildcard();
    return constant(std::string(text));
}

std::string TokenSeq::text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string to_string(TemplateId id) { return "E" + std::to_string(id.value); }

TokenList to_template_tokens(const TokenSeq& seq) {
    TokenList out;
    out.reserve(seq.length());
    for (const auto& t : seq.tokens) out.push_back(TemplateToken::from_text(t));
    return out;
}

std::string render(std::span<const TemplateToken> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i].text();
    }
    return out;
}

std::string render(std::span<const TemplateToken> tokens, const std::vector<bool>& joined) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && !(i < joined.size() && joined[i])) out += ' ';
        out += tokens[i].text();
    }
    return out;
}

double similarity(std::span<const TemplateToken> lhs, std::span<const TemplateToken> rhs) {
    require_same_length(lhs.size(), rhs.size(), "similarity");
    if (lhs.empty()) return 1.0;
    std::size_t matching = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i].is_wildcard() || rhs[i].is_wildcard() || lhs[i] == rhs[i]) ++matching;
    }
    return static_cast<double>(matching) / static_cast<double>(lhs.size());
}

double similarity(const TokenSeq& log, const Template& tpl) {
    require_same_length(log.length(), tpl.length(), "similarity");
    if (tpl.tokens.empty()) return 1.0;
    std::size_t matching = 0;
    for (std::size_t i = 0; i < log.length(); ++i) {
        const auto& t = tpl.tokens[i];
        if (t.is_wildcard() || log.is_wildcard(i) || t.text() == log.tokens[i]) ++matching;
    }
    return static_cast<double>(matching) / static_cast<double>(tpl.length());
}

TokenList merge(std::span<const TemplateToken> log, std::span<const TemplateToken> tpl) {
    require_same_length(log.size(), tpl.size(), "merge");
    TokenList out;
    out.reserve(tpl.size());
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (!tpl[i].is_wildcard() && tpl[i] == log[i]) {
            out.push_back(tpl[i]);
        } else {
            out.push_back(TemplateToken::wildcard());
        }
    }
    return out;
}

TokenList merge(const TokenSeq& log, const Template& tpl) {
    require_same_length(log.length(), tpl.length(), "merge");
    TokenList out;
    out.reserve(tpl.length());
    for (std::size_t i = 0; i < tpl.length(); ++i) {
        const auto& t = tpl.tokens[i];
        if (!t.is_wildcard() && !log.is_wildcard(i) && t.text() == log.tokens[i]) {
            out.push_back(t);
        } else {
            out.push_back(TemplateToken::wildcard());
        }
    }
    return out;
}

std::size_t wildcard_count(std::span<const TemplateToken> tokens) {
    return static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [](const auto& t) { return t.is_wildcard(); }));
}

}  // namespace bdparse
