#include "bdparse/nlpe.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "bdparse/assets.hpp"
#include "bdparse/errors.hpp"

namespace bdparse::nlpe {

const std::vector<std::string>& constant_rules() {
    static const std::vector<std::string> rules{
        "Domain-specific term (e.g., IPv4).",
        "Modifier in a compound noun representing a fixed label (e.g., Failed).",
        "Subject in a subject–verb–object structure.",
        "Tokens expressing opposing or discrete semantics (e.g., boot vs. shutdown).",
        "Singular/plural variants are not treated as equivalent (e.g., user vs. users).",
    };
    return rules;
}

const std::vector<std::string>& variable_rules() {
    static const std::vector<std::string> rules{
        "Identifiers, IPs, timestamps, user names, and other data-like tokens.",
        "Key–value patterns: retain the key and abstract the value (e.g., user root → user <*>).",
        "key:value or key=value forms: keep key, abstract value.",
    };
    return rules;
}

namespace {

std::string rules_block() {
    std::string out = "Constant tokens:\n";
    for (const auto& r : constant_rules()) out += "- " + r + "\n";
    out += "Variable tokens:\n";
    for (const auto& r : variable_rules()) out += "- " + r + "\n";
    out.pop_back();
    return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

std::string_view trim_decoration(std::string_view line) {
    auto junk = [](unsigned char c) { return std::isspace(c) || c == '*' || c == '`' || c == '#' || c == '>'; };
    while (!line.empty() && junk(line.front())) line.remove_prefix(1);
    // Trailing '>' and lone '*' may belong to a final "<*>", so only markdown
    // emphasis and code fences are removed from the end.
    for (;;) {
        while (!line.empty() && (std::isspace(static_cast<unsigned char>(line.back())) || line.back() == '`')) {
            line.remove_suffix(1);
        }
        if (line.ends_with("**")) {
            line.remove_suffix(2);
        } else if (line.ends_with("*") && !line.ends_with("<*")) {
            line.remove_suffix(1);
        } else {
            return line;
        }
    }
}

}  // namespace

PromptTemplate::PromptTemplate() : text_(assets::prompt_template()) {}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {}

std::string PromptTemplate::build(const TokenSeq& log, const Template& tpl) const {
    // {rules} first: the rule text itself contains "<*>" but no braces.
    std::string out = text_;
    replace_all(out, "{rules}", rules_block());
    const std::string log_text = log.text();
    const std::string tpl_text = render(tpl.tokens);
    std::string result;
    result.reserve(out.size() + log_text.size() + tpl_text.size());
    for (std::size_t i = 0; i < out.size();) {
        if (out.compare(i, 5, "{log}") == 0) {
            result += log_text;
            i += 5;
        } else if (out.compare(i, 10, "{template}") == 0) {
            result += tpl_text;
            i += 10;
        } else {
            result += out[i++];
        }
    }
    return result;
}

std::string build_prompt(const TokenSeq& log, const Template& tpl) {
    static const PromptTemplate prompt;
    return prompt.build(log, tpl);
}

ReplyParse parse_reply(std::string_view text, std::size_t expected_length, const Preprocessor& preprocessor) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        auto nl = text.find('\n');
        lines.push_back(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    }
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        auto line = trim_decoration(*it);
        if (line == "NO_MATCH") return {MatchVerdict::no_match(), false};
        if (!line.starts_with("MATCH:")) continue;
        auto body = line.substr(6);
        try {
            auto seq = preprocessor.tokenize(body);
            if (seq.length() != expected_length) return {MatchVerdict::no_match(), true};
            return {MatchVerdict::match(to_template_tokens(seq)), false};
        } catch (const EmptyLineError&) {
            return {MatchVerdict::no_match(), true};
        }
    }
    return {MatchVerdict::no_match(), true};
}

std::vector<std::size_t> differing_positions(const TokenSeq& log, const Template& tpl) {
    if (log.length() != tpl.length()) {
        throw PreconditionError("length mismatch between log and template " + to_string(tpl.id));
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < log.length(); ++i) {
        const auto& t = tpl.tokens[i];
        if (t.is_wildcard() || log.is_wildcard(i)) continue;
        if (t.text() != log.tokens[i]) out.push_back(i);
    }
    return out;
}

Extractor::Extractor(Options options, std::shared_ptr<const pos::Tagger> tagger, llm::Client* client,
                     const Preprocessor* preprocessor, PromptTemplate prompt)
    : options_(options),
      tagger_(std::move(tagger)),
      client_(client),
      preprocessor_(preprocessor),
      prompt_(std::move(prompt)) {
    if (options_.use_pos && !tagger_) throw ConfigError("POS stage enabled without a tagger");
    if (options_.use_llm && !preprocessor_) throw ConfigError("LLM stage needs the preprocessor to read replies");
}

MatchVerdict Extractor::stage1(const ComparisonInput& input) const {
    const auto& log = *input.log;
    const auto& tpl = *input.tpl;
    auto diffs = differing_positions(log, tpl);
    if (diffs.empty()) return MatchVerdict::match(merge(log, tpl));
    if (!options_.use_pos) return MatchVerdict::undetermined(std::move(diffs));

    bool all_numeric = true;
    for (auto p : diffs) {
        const PosTag log_tag = tagger_->tag(log.tokens[p]);
        const auto& tok = tpl.tokens[p];
        if (!tok.pos()) tok.set_pos(tagger_->tag(tok.text()));
        const PosTag tpl_tag = *tok.pos();
        if (pos::is_fixed_constant(log_tag) || pos::is_fixed_constant(tpl_tag)) return MatchVerdict::no_match();
        if (log_tag != PosTag::NUM && tpl_tag != PosTag::NUM) all_numeric = false;
    }
    if (all_numeric) return MatchVerdict::match(merge(log, tpl));
    return MatchVerdict::undetermined(std::move(diffs));
}

Stage2Result Extractor::stage2(const ComparisonInput& input) {
    const auto& log = *input.log;
    const auto& tpl = *input.tpl;
    TokenList merged = merge(log, tpl);
    if (differing_positions(log, tpl).empty()) return {MatchVerdict::match(std::move(merged)), false, false};
    if (!client_) throw Stage2Unavailable("no LLM backend configured");

    llm::Completion reply;
    try {
        reply = client_->complete(prompt_.build(log, tpl));
    } catch (const llm::LlmError& e) {
        throw Stage2Unavailable(e.what());
    }
    auto parsed = parse_reply(reply.text, log.length(), *preprocessor_);
    if (!parsed.verdict.is_match()) return {std::move(parsed.verdict), true, parsed.malformed};

    // The model may abstract extra positions but cannot restore a constant
    // that the two inputs disagree on.
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (parsed.verdict.merged[i].is_wildcard()) merged[i] = TemplateToken::wildcard();
    }
    return {MatchVerdict::match(std::move(merged)), true, false};
}

CompareOutcome Extractor::resolve_undetermined(const ComparisonInput& best) {
    CompareOutcome out;
    if (!options_.use_llm) {
        out.accepted = 0;
        out.merged = merge(*best.log, *best.tpl);
        return out;
    }
    auto r = stage2(best);
    out.llm_called = r.llm_called;
    out.malformed = r.malformed;
    if (r.verdict.is_match()) {
        out.accepted = 0;
        out.merged = std::move(r.verdict.merged);
    } else {
        out.rejected.push_back(best.tpl->id);
    }
    return out;
}

CompareOutcome Extractor::compare(std::span<const ComparisonInput> candidates) {
    CompareOutcome out;
    std::optional<std::size_t> first_undetermined;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto v = stage1(candidates[i]);
        switch (v.kind) {
            case MatchVerdict::Kind::match:
                out.accepted = i;
                out.merged = std::move(v.merged);
                return out;
            case MatchVerdict::Kind::no_match:
                out.rejected.push_back(candidates[i].tpl->id);
                break;
            case MatchVerdict::Kind::undetermined:
                if (!first_undetermined) first_undetermined = i;
                break;
        }
    }
    if (!first_undetermined) return out;

    auto resolved = resolve_undetermined(candidates[*first_undetermined]);
    out.llm_called = resolved.llm_called;
    out.malformed = resolved.malformed;
    out.rejected.insert(out.rejected.end(), resolved.rejected.begin(), resolved.rejected.end());
    if (resolved.accepted) {
        out.accepted = first_undetermined;
        out.merged = std::move(resolved.merged);
    }
    return out;
}

}  // namespace bdparse::nlpe
