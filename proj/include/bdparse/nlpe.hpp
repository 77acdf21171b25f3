#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdparse/llm_client.hpp"
#include "bdparse/model.hpp"
#include "bdparse/pos.hpp"
#include "bdparse/preprocess.hpp"

namespace bdparse::nlpe {

/// Token classification rules given to the model, one bullet each.
const std::vector<std::string>& constant_rules();
const std::vector<std::string>& variable_rules();

/// Prompt text with `{rules}`, `{log}` and `{template}` placeholders.
class PromptTemplate {
public:
    /// The shipped template.
    PromptTemplate();
    explicit PromptTemplate(std::string text);

    std::string build(const TokenSeq& log, const Template& tpl) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

std::string build_prompt(const TokenSeq& log, const Template& tpl);

struct ReplyParse {
    MatchVerdict verdict;
    bool malformed = false;
};

/// Reads the final `MATCH: <template>` / `NO_MATCH` line. Anything else,
/// including a template of the wrong length, is a malformed NoMatch.
ReplyParse parse_reply(std::string_view text, std::size_t expected_length, const Preprocessor& preprocessor);

struct ComparisonInput {
    const TokenSeq* log = nullptr;
    const Template* tpl = nullptr;
    double similarity = 0.0;
};

/// Positions where both sides are concrete tokens and differ.
std::vector<std::size_t> differing_positions(const TokenSeq& log, const Template& tpl);

struct Options {
    bool use_pos = true;
    bool use_llm = true;
};

struct Stage2Result {
    MatchVerdict verdict;
    bool llm_called = false;
    bool malformed = false;
};

struct CompareOutcome {
    /// Index into the candidate list of the accepted template, if any.
    std::optional<std::size_t> accepted;
    TokenList merged;
    bool llm_called = false;
    bool malformed = false;
    /// Candidates rejected outright (syntactically or by the model).
    std::vector<TemplateId> rejected;
};

/// Two-stage match arbiter: POS rejection first, then at most one model call
/// for the best candidate the POS stage could not settle.
class Extractor {
public:
    Extractor(Options options, std::shared_ptr<const pos::Tagger> tagger, llm::Client* client,
              const Preprocessor* preprocessor, PromptTemplate prompt = {});

    const Options& options() const { return options_; }

    /// Match when no concrete token differs; NoMatch when a differing position
    /// carries a fixed-constant tag on either side; Match when every difference
    /// involves a number; Undetermined otherwise.
    MatchVerdict stage1(const ComparisonInput& input) const;

    /// One model call. Throws Stage2Unavailable when the backend gives up.
    Stage2Result stage2(const ComparisonInput& input);

    /// `candidates` must be sorted best-first. Runs stage1 on all of them and
    /// returns the first match; otherwise hands the first undetermined
    /// candidate to stage2 (or accepts it when the model is disabled).
    CompareOutcome compare(std::span<const ComparisonInput> candidates);

    /// The post-scan step of compare, for callers that ran stage1 themselves.
    CompareOutcome resolve_undetermined(const ComparisonInput& best_undetermined);

private:
    Options options_;
    std::shared_ptr<const pos::Tagger> tagger_;
    llm::Client* client_;
    const Preprocessor* preprocessor_;
    PromptTemplate prompt_;
};

}  // namespace bdparse::nlpe
