#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bdparse {

inline constexpr std::string_view kPlaceholder = "<*>";

enum class PosTag : std::uint8_t {
    VERB,
    NOUN,
    PROPN,
    ADJ,
    ADV,
    ADP,
    DET,
    CONJ,
    PUNCT,
    NUM,
    SYM,
    OTHER,
};

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);

/// One position of a template: a constant word or the wildcard.
/// Constants cache their POS tag after the first comparison that needed it.
class TemplateToken {
public:
    static TemplateToken wildcard() { return TemplateToken{}; }
    static TemplateToken constant(std::string text, std::optional<PosTag> pos = std::nullopt);
    /// "<*>" becomes a wildcard, anything else a constant.
    static TemplateToken from_text(std::string_view text);

    bool is_wildcard() const { return wildcard_; }
    /// The constant text, or "<*>" for a wildcard.
    std::string_view text() const { return wildcard_ ? kPlaceholder : std::string_view{text_}; }
    const std::optional<PosTag>& pos() const { return pos_; }
    void set_pos(PosTag tag) const { pos_ = tag; }

    /// Equality ignores the cached tag.
    friend bool operator==(const TemplateToken& a, const TemplateToken& b) {
        return a.wildcard_ == b.wildcard_ && a.text_ == b.text_;
    }

private:
    TemplateToken() = default;

    bool wildcard_ = true;
    std::string text_;
    mutable std::optional<PosTag> pos_;
};

using TokenList = std::vector<TemplateToken>;

/// A preprocessed log message. `joined[i]` records that token i followed
/// token i-1 without intervening whitespace; it only affects rendering.
struct TokenSeq {
    std::vector<std::string> tokens;
    std::vector<bool> joined;

    std::size_t length() const { return tokens.size(); }
    bool is_wildcard(std::size_t i) const { return tokens[i] == kPlaceholder; }
    /// Single-space rendering.
    std::string text() const;

    friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

struct TemplateId {
    std::uint64_t value = 0;
    friend auto operator<=>(const TemplateId&, const TemplateId&) = default;
};

std::string to_string(TemplateId id);

struct Template {
    TemplateId id;
    TokenList tokens;
    /// Spacing layout inherited from the log that created the template.
    std::vector<bool> joined;
    bool updated = false;
    std::uint64_t match_count = 1;

    std::size_t length() const { return tokens.size(); }
};

/// Binds an input line to a template id; the template text is resolved at export.
struct ParsedRecord {
    std::uint64_t line_id = 0;
    std::string content;
    TemplateId template_id;
};

/// Outcome of comparing a log with a candidate template.
struct MatchVerdict {
    enum class Kind { match, no_match, undetermined };

    Kind kind = Kind::no_match;
    /// Set for `match`: the generalized template, same length as the inputs.
    TokenList merged;
    /// Set for `undetermined`: positions whose concrete tokens differ.
    std::vector<std::size_t> diff_positions;

    static MatchVerdict match(TokenList merged) { return {Kind::match, std::move(merged), {}}; }
    static MatchVerdict no_match() { return {}; }
    static MatchVerdict undetermined(std::vector<std::size_t> positions) {
        return {Kind::undetermined, {}, std::move(positions)};
    }

    bool is_match() const { return kind == Kind::match; }
};

TokenList to_template_tokens(const TokenSeq& seq);

/// Single-space rendering: "<*> send <*> packages".
std::string render(std::span<const TemplateToken> tokens);
/// Rendering that restores the original spacing ("user=<*>").
std::string render(std::span<const TemplateToken> tokens, const std::vector<bool>& joined);

/// Fraction of positions where tokens are equal or either side is a wildcard.
double similarity(std::span<const TemplateToken> lhs, std::span<const TemplateToken> rhs);
double similarity(const TokenSeq& log, const Template& tpl);

/// Positionwise merge: equal constants survive, everything else becomes "<*>".
/// Surviving constants keep the right-hand (template) side's cached POS tag.
TokenList merge(std::span<const TemplateToken> log, std::span<const TemplateToken> tpl);
TokenList merge(const TokenSeq& log, const Template& tpl);

std::size_t wildcard_count(std::span<const TemplateToken> tokens);
inline std::size_t wildcard_count(const Template& tpl) { return wildcard_count(tpl.tokens); }

}  // namespace bdparse

template <>
struct std::hash<bdparse::TemplateId> {
    std::size_t operator()(const bdparse::TemplateId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
