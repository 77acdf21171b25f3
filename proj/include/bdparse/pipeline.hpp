#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdparse/bdpt.hpp"
#include "bdparse/llm_client.hpp"
#include "bdparse/model.hpp"
#include "bdparse/nlpe.hpp"
#include "bdparse/pos.hpp"
#include "bdparse/preprocess.hpp"
#include "bdparse/ptmp.hpp"

namespace bdparse {

struct AblationFlags {
    bool disable_nlpe = false;
    bool disable_llm = false;
    bool disable_pos = false;
    bool disable_ptmp = false;
    bool disable_bdpt = false;
};

struct PipelineCounters {
    std::uint64_t matched_bdpt_forward = 0;
    std::uint64_t matched_bdpt_reverse = 0;
    std::uint64_t matched_ptmp = 0;
    std::uint64_t new_templates = 0;
    std::uint64_t nlpe_invocations = 0;
    std::uint64_t llm_calls = 0;
    std::uint64_t malformed_replies = 0;
    std::uint64_t stage2_unavailable = 0;
    std::uint64_t skipped_lines = 0;

    std::uint64_t lines_parsed() const {
        return matched_bdpt_forward + matched_bdpt_reverse + matched_ptmp + new_templates;
    }
    friend bool operator==(const PipelineCounters&, const PipelineCounters&) = default;
};

struct PipelineOptions {
    double similarity_threshold = 0.5;
    std::optional<std::size_t> top_k;
    AblationFlags flags;
};

enum class MatchSource { bdpt_forward, bdpt_reverse, ptmp, new_template };

std::string_view to_string(MatchSource source);

struct LineResult {
    TemplateId template_id;
    MatchSource source;
};

struct SkippedLine {
    std::uint64_t input_line = 0;
    std::string reason;
};

struct ExportedRecord {
    std::uint64_t line_id = 0;
    std::string content;
    TemplateId template_id;
    std::string template_text;
};

struct ExportedTemplate {
    TemplateId id;
    std::string text;
    std::uint64_t occurrences = 0;
};

struct ExportResult {
    std::vector<ExportedRecord> records;
    std::vector<ExportedTemplate> templates;
    PipelineCounters counters;
};

/// Online parser: preprocess, tree match in both directions, pool fallback,
/// otherwise a new template. Strictly sequential; one instance per stream.
class Parser {
public:
    /// `client` may be null when the model stage is disabled; it is not owned.
    Parser(PipelineOptions options, Preprocessor preprocessor, std::shared_ptr<const pos::Tagger> tagger,
           llm::Client* client);

    /// Returns nullopt for blank lines, which are recorded as skipped.
    std::optional<LineResult> parse_line(std::string_view raw);

    /// Registers known templates (e.g. from an earlier run) before parsing.
    void seed_templates(const std::vector<std::string>& templates);

    /// Records carry the current text of their template, so later merges
    /// are reflected in earlier lines.
    ExportResult export_results() const;

    const PipelineOptions& options() const { return options_; }
    const PipelineCounters& counters() const { return counters_; }
    const std::vector<ParsedRecord>& records() const { return records_; }
    const std::vector<SkippedLine>& skipped() const { return skipped_; }
    const ptmp::TemplatePool& pool() const { return pool_; }
    const bdpt::ParseTree& tree() const { return tree_; }
    const Preprocessor& preprocessor() const { return preprocessor_; }

private:
    struct Accepted {
        TemplateId id;
        TokenList merged;
        MatchSource source;
    };

    std::optional<Accepted> match_tree(const TokenSeq& log, std::vector<TemplateId>& rejected);
    std::optional<Accepted> match_pool(const TokenSeq& log, const std::vector<TemplateId>& rejected);
    void note(const nlpe::CompareOutcome& outcome);
    TemplateId commit(const TokenSeq& log, std::optional<Accepted> accepted, MatchSource& source);

    PipelineOptions options_;
    Preprocessor preprocessor_;
    std::shared_ptr<const pos::Tagger> tagger_;
    std::optional<nlpe::Extractor> extractor_;
    bdpt::ParseTree tree_;
    ptmp::TemplatePool pool_;
    std::vector<ParsedRecord> records_;
    std::vector<SkippedLine> skipped_;
    PipelineCounters counters_;
    std::uint64_t input_lines_ = 0;
};

}  // namespace bdparse
