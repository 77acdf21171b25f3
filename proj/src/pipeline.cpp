#include "bdparse/pipeline.hpp"

#include <algorithm>
#include <map>

#include "bdparse/errors.hpp"

namespace bdparse {

std::string_view to_string(MatchSource source) {
    switch (source) {
        case MatchSource::bdpt_forward: return "bdpt_forward";
        case MatchSource::bdpt_reverse: return "bdpt_reverse";
        case MatchSource::ptmp: return "ptmp";
        case MatchSource::new_template: return "new_template";
    }
    return "unknown";
}

namespace {

struct Candidate {
    const Template* tpl;
    double similarity;
    std::size_t wildcards;
    bdpt::Direction direction;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.wildcards != b.wildcards) return a.wildcards < b.wildcards;
    if (a.direction != b.direction) return a.direction == bdpt::Direction::forward;
    return a.tpl->id < b.tpl->id;
}

bool contains(const std::vector<TemplateId>& ids, TemplateId id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

Parser::Parser(PipelineOptions options, Preprocessor preprocessor, std::shared_ptr<const pos::Tagger> tagger,
               llm::Client* client)
    : options_(options), preprocessor_(std::move(preprocessor)), tagger_(std::move(tagger)) {
    auto& f = options_.flags;
    if (f.disable_nlpe) {
        f.disable_llm = true;
        f.disable_pos = true;
    } else if (f.disable_llm && f.disable_pos) {
        f.disable_nlpe = true;
    }
    if (!f.disable_nlpe) {
        nlpe::Options opts{.use_pos = !f.disable_pos, .use_llm = !f.disable_llm};
        if (opts.use_pos && !tagger_) tagger_ = pos::default_tagger();
        extractor_.emplace(opts, tagger_, client, &preprocessor_);
    }
}

void Parser::note(const nlpe::CompareOutcome& outcome) {
    counters_.llm_calls += outcome.llm_called ? 1 : 0;
    counters_.malformed_replies += outcome.malformed ? 1 : 0;
}

std::optional<Parser::Accepted> Parser::match_tree(const TokenSeq& log, std::vector<TemplateId>& rejected) {
    std::vector<Candidate> candidates;
    for (auto dir : {bdpt::Direction::forward, bdpt::Direction::reverse}) {
        const auto* group = tree_.descend(dir, log);
        if (!group) continue;
        for (auto id : *group) {
            if (std::any_of(candidates.begin(), candidates.end(), [&](const auto& c) { return c.tpl->id == id; })) {
                continue;
            }
            const auto& tpl = pool_.get(id);
            const double sim = similarity(log, tpl);
            if (sim < options_.similarity_threshold) continue;
            candidates.push_back({&tpl, sim, wildcard_count(tpl), dir});
        }
    }
    if (candidates.empty()) return std::nullopt;
    std::sort(candidates.begin(), candidates.end(), better);

    auto source_of = [](const Candidate& c) {
        return c.direction == bdpt::Direction::forward ? MatchSource::bdpt_forward : MatchSource::bdpt_reverse;
    };
    const auto& best = candidates.front();
    if (!extractor_ || nlpe::differing_positions(log, *best.tpl).empty()) {
        return Accepted{best.tpl->id, merge(log, *best.tpl), source_of(best)};
    }

    ++counters_.nlpe_invocations;
    std::vector<nlpe::ComparisonInput> inputs;
    inputs.reserve(candidates.size());
    for (const auto& c : candidates) inputs.push_back({&log, c.tpl, c.similarity});
    nlpe::CompareOutcome outcome;
    try {
        outcome = extractor_->compare(inputs);
    } catch (const Stage2Unavailable&) {
        ++counters_.stage2_unavailable;
        return std::nullopt;
    }
    note(outcome);
    rejected = outcome.rejected;
    if (!outcome.accepted) return std::nullopt;
    const auto& winner = candidates[*outcome.accepted];
    return Accepted{winner.tpl->id, std::move(outcome.merged), source_of(winner)};
}

std::optional<Parser::Accepted> Parser::match_pool(const TokenSeq& log, const std::vector<TemplateId>& rejected) {
    ptmp::GlobalMatchOptions opts;
    opts.top_k = options_.top_k;
    opts.threshold = options_.similarity_threshold;
    if (!rejected.empty()) opts.skip = [&](TemplateId id) { return contains(rejected, id); };

    bool nlpe_used = false;
    std::optional<Candidate> undetermined;
    ptmp::Arbiter arbiter = [&](const Template& tpl, double sim) -> MatchVerdict {
        if (!extractor_ || nlpe::differing_positions(log, tpl).empty()) return MatchVerdict::match(merge(log, tpl));
        nlpe_used = true;
        auto v = extractor_->stage1({&log, &tpl, sim});
        if (v.kind == MatchVerdict::Kind::undetermined) {
            Candidate c{&tpl, sim, wildcard_count(tpl), bdpt::Direction::forward};
            // Ties keep the earlier, higher-priority candidate.
            if (!undetermined || c.similarity > undetermined->similarity ||
                (c.similarity == undetermined->similarity && c.wildcards < undetermined->wildcards)) {
                undetermined = c;
            }
            return MatchVerdict::no_match();
        }
        return v;
    };

    auto found = ptmp::global_match(pool_, log, arbiter, opts);
    if (nlpe_used) ++counters_.nlpe_invocations;
    if (found) return Accepted{found->id, std::move(found->merged), MatchSource::ptmp};
    if (!undetermined) return std::nullopt;

    nlpe::CompareOutcome outcome;
    try {
        outcome = extractor_->resolve_undetermined({&log, undetermined->tpl, undetermined->similarity});
    } catch (const Stage2Unavailable&) {
        ++counters_.stage2_unavailable;
        return std::nullopt;
    }
    note(outcome);
    if (!outcome.accepted) return std::nullopt;
    return Accepted{undetermined->tpl->id, std::move(outcome.merged), MatchSource::ptmp};
}

TemplateId Parser::commit(const TokenSeq& log, std::optional<Accepted> accepted, MatchSource& source) {
    if (!accepted) {
        const auto& tpl = pool_.add(to_template_tokens(log), log.joined);
        if (!options_.flags.disable_bdpt) tree_.insert(tpl.id, tpl.tokens);
        ++counters_.new_templates;
        source = MatchSource::new_template;
        return tpl.id;
    }

    const auto id = accepted->id;
    const auto& current = pool_.get(id);
    const bool changed = accepted->merged != current.tokens;
    if (changed) {
        if (!options_.flags.disable_bdpt) {
            const TokenList old_tokens = current.tokens;
            tree_.apply_update(id, old_tokens, accepted->merged);
        }
        pool_.replace_tokens(id, std::move(accepted->merged));
    }
    pool_.record_match(id, changed);
    source = accepted->source;
    switch (source) {
        case MatchSource::bdpt_forward: ++counters_.matched_bdpt_forward; break;
        case MatchSource::bdpt_reverse: ++counters_.matched_bdpt_reverse; break;
        case MatchSource::ptmp: ++counters_.matched_ptmp; break;
        case MatchSource::new_template: break;
    }
    return id;
}

std::optional<LineResult> Parser::parse_line(std::string_view raw) {
    ++input_lines_;
    TokenSeq log;
    try {
        log = preprocessor_.tokenize(raw);
    } catch (const EmptyLineError& e) {
        skipped_.push_back({input_lines_, e.what()});
        ++counters_.skipped_lines;
        return std::nullopt;
    }

    std::vector<TemplateId> rejected;
    std::optional<Accepted> accepted;
    if (!options_.flags.disable_bdpt) accepted = match_tree(log, rejected);
    if (!accepted && !options_.flags.disable_ptmp) accepted = match_pool(log, rejected);

    MatchSource source{};
    const TemplateId id = commit(log, std::move(accepted), source);
    records_.push_back({records_.size() + 1, std::string(raw), id});
    return LineResult{id, source};
}

void Parser::seed_templates(const std::vector<std::string>& templates) {
    for (const auto& text : templates) {
        TokenSeq seq;
        try {
            seq = preprocessor_.tokenize(text);
        } catch (const EmptyLineError&) {
            continue;
        }
        const auto& tpl = pool_.add(to_template_tokens(seq), seq.joined);
        if (!options_.flags.disable_bdpt) tree_.insert(tpl.id, tpl.tokens);
    }
}

ExportResult Parser::export_results() const {
    ExportResult out;
    out.counters = counters_;
    std::map<TemplateId, std::uint64_t> occurrences;
    std::vector<std::string> rendered(pool_.size());
    for (const auto& tpl : pool_.templates()) rendered[tpl.id.value - 1] = render(tpl.tokens, tpl.joined);

    out.records.reserve(records_.size());
    for (const auto& r : records_) {
        out.records.push_back({r.line_id, r.content, r.template_id, rendered.at(r.template_id.value - 1)});
        ++occurrences[r.template_id];
    }
    for (const auto& [id, count] : occurrences) out.templates.push_back({id, rendered[id.value - 1], count});
    return out;
}

}  // namespace bdparse
