#include "bdparse/ptmp.hpp"

#include <algorithm>
#include <exception>

namespace bdparse::ptmp {

std::vector<Template> sort_by_priority(std::vector<Template> templates) {
    std::stable_sort(templates.begin(), templates.end(),
                     [](const Template& a, const Template& b) { return priority_of(a) < priority_of(b); });
    return templates;
}

const Template& TemplatePool::add(TokenList tokens, std::vector<bool> joined) {
    if (tokens.empty()) throw PreconditionError("template must have at least one token");
    Template tpl;
    tpl.id = TemplateId{templates_.size() + 1};
    tpl.tokens = std::move(tokens);
    tpl.joined = std::move(joined);
    tpl.updated = false;
    tpl.match_count = 1;

    // New entries carry (0, 1), the smallest reachable tuple: they sort
    // after existing (0, 1) entries and before everything else.
    auto& bucket = buckets_[tpl.length()];
    const Priority key = priority_of(tpl);
    auto pos = std::upper_bound(bucket.begin(), bucket.end(), key, [&](const Priority& k, TemplateId other) {
        return k < priority_of(get(other));
    });
    bucket.insert(pos, tpl.id);
    templates_.push_back(std::move(tpl));
    return templates_.back();
}

bool TemplatePool::contains(TemplateId id) const { return id.value >= 1 && id.value <= templates_.size(); }

const Template& TemplatePool::get(TemplateId id) const {
    if (!contains(id)) throw ConsistencyError("unknown template id " + to_string(id));
    return templates_[id.value - 1];
}

Template& TemplatePool::mutable_get(TemplateId id) {
    if (!contains(id)) throw ConsistencyError("unknown template id " + to_string(id));
    return templates_[id.value - 1];
}

void TemplatePool::replace_tokens(TemplateId id, TokenList tokens) {
    auto& tpl = mutable_get(id);
    if (tokens.size() != tpl.length()) {
        throw PreconditionError("replace_tokens: length change for " + to_string(id));
    }
    tpl.tokens = std::move(tokens);
}

void TemplatePool::record_match(TemplateId id, bool was_updated) {
    auto& tpl = mutable_get(id);
    tpl.match_count += 1;
    tpl.updated = tpl.updated || was_updated;

    // The key only grows, so the entry moves right past every entry with a
    // smaller key; this is exactly where a stable re-sort would put it.
    auto& bucket = buckets_.at(tpl.length());
    auto self = std::find(bucket.begin(), bucket.end(), id);
    if (self == bucket.end()) throw ConsistencyError("template " + to_string(id) + " missing from its bucket");
    const Priority key = priority_of(tpl);
    auto stop = std::find_if(std::next(self), bucket.end(),
                             [&](TemplateId other) { return !(priority_of(get(other)) < key); });
    std::rotate(self, std::next(self), stop);
}

std::span<const TemplateId> TemplatePool::bucket(std::size_t n) const {
    auto it = buckets_.find(n);
    if (it == buckets_.end()) return {};
    return it->second;
}

std::vector<std::size_t> TemplatePool::lengths() const {
    std::vector<std::size_t> out;
    for (const auto& [n, _] : buckets_) out.push_back(n);
    return out;
}

void TemplatePool::check_invariants() const {
    std::size_t seen = 0;
    for (const auto& [n, ids] : buckets_) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto& tpl = get(ids[i]);
            if (tpl.length() != n) throw ConsistencyError(to_string(tpl.id) + " is in the wrong bucket");
            if (i > 0 && priority_of(tpl) < priority_of(get(ids[i - 1]))) {
                throw ConsistencyError("bucket " + std::to_string(n) + " out of priority order at " +
                                       to_string(tpl.id));
            }
        }
        seen += ids.size();
    }
    if (seen != templates_.size()) throw ConsistencyError("bucket membership does not cover the pool");
}

std::optional<PoolMatch> global_match(const TemplatePool& pool, const TokenSeq& log, const Arbiter& arbiter,
                                      const GlobalMatchOptions& options) {
    const auto ids = pool.bucket(log.length());
    const std::size_t limit = options.top_k ? std::min(*options.top_k, ids.size()) : ids.size();
    for (std::size_t i = 0; i < limit; ++i) {
        const auto& candidate = pool.get(ids[i]);
        if (options.skip && options.skip(candidate.id)) continue;
        const double sim = similarity(log, candidate);
        if (sim < options.threshold) continue;

        MatchVerdict verdict;
        try {
            verdict = arbiter(candidate, sim);
        } catch (const std::exception& e) {
            std::throw_with_nested(ArbiterError(candidate.id, e.what()));
        }
        if (verdict.is_match()) return PoolMatch{candidate.id, std::move(verdict.merged), sim};
    }
    return std::nullopt;
}

}  // namespace bdparse::ptmp
