#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bdparse/model.hpp"

namespace bdparse::pos {

/// Word list plus ordered suffix fallbacks. Lookups are case-insensitive.
class Lexicon {
public:
    Lexicon() = default;

    /// Parses the `word<TAB>TAG` format. Lines starting with '#' are comments;
    /// a word starting with '-' (e.g. "-ing") declares a suffix rule.
    static Lexicon parse(std::string_view text);
    static Lexicon load(const std::filesystem::path& path);
    /// The lexicon shipped with the library.
    static const Lexicon& builtin();

    void add(std::string word, PosTag tag);
    void add_suffix_rule(std::string suffix, PosTag tag);

    std::optional<PosTag> lookup(std::string_view word) const;
    std::optional<PosTag> suffix_tag(std::string_view word) const;

    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<std::string, PosTag>>& suffix_rules() const { return suffix_rules_; }

private:
    std::unordered_map<std::string, PosTag> entries_;
    std::vector<std::pair<std::string, PosTag>> suffix_rules_;
};

/// Interface so a heavier external tagger can replace the lexicon tagger.
class Tagger {
public:
    virtual ~Tagger() = default;
    virtual PosTag tag(std::string_view token) const = 0;
};

class LexiconTagger final : public Tagger {
public:
    explicit LexiconTagger(std::shared_ptr<const Lexicon> lexicon,
                           std::string placeholder = std::string(kPlaceholder));

    /// "<*>" -> SYM, punctuation -> PUNCT, numbers -> NUM, then lexicon,
    /// suffix rules, capitalized/digit-bearing -> PROPN, otherwise NOUN.
    PosTag tag(std::string_view token) const override;

    const Lexicon& lexicon() const { return *lexicon_; }

private:
    std::shared_ptr<const Lexicon> lexicon_;
    std::string placeholder_;
};

std::shared_ptr<const Tagger> default_tagger();

/// True for the classes log writers keep constant: verbs, punctuation,
/// conjunctions, adpositions and determiners.
constexpr bool is_fixed_constant(PosTag tag) {
    switch (tag) {
        case PosTag::VERB:
        case PosTag::PUNCT:
        case PosTag::CONJ:
        case PosTag::ADP:
        case PosTag::DET:
            return true;
        default:
            return false;
    }
}

bool is_numeric(std::string_view token);

}  // namespace bdparse::pos
