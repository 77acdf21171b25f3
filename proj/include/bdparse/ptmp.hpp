#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bdparse/errors.hpp"
#include "bdparse/model.hpp"

namespace bdparse::ptmp {

/// (updated, match count); ascending order puts the least settled templates first.
struct Priority {
    bool updated = false;
    std::uint64_t match_count = 0;
    friend auto operator<=>(const Priority&, const Priority&) = default;
};

inline Priority priority_of(const Template& t) { return {t.updated, t.match_count}; }

/// Stable ascending sort by priority tuple.
std::vector<Template> sort_by_priority(std::vector<Template> templates);

/// Owner of every template record, bucketed by token length in priority order.
class TemplatePool {
public:
    /// Creates a template with the next id, u = 0 and n = 1.
    const Template& add(TokenList tokens, std::vector<bool> joined = {});

    bool contains(TemplateId id) const;
    /// Throws ConsistencyError for unknown ids.
    const Template& get(TemplateId id) const;

    /// Replaces the template's tokens; the priority is adjusted by record_match.
    void replace_tokens(TemplateId id, TokenList tokens);

    /// n += 1, u |= was_updated, then restores the bucket order.
    void record_match(TemplateId id, bool was_updated);

    /// Ids of length-n templates in priority order (empty span if none).
    std::span<const TemplateId> bucket(std::size_t n) const;
    std::vector<std::size_t> lengths() const;

    std::size_t size() const { return templates_.size(); }
    /// All templates in id order.
    const std::vector<Template>& templates() const { return templates_; }

    /// Throws ConsistencyError if any bucket is out of order or membership is off.
    void check_invariants() const;

private:
    Template& mutable_get(TemplateId id);

    std::vector<Template> templates_;
    std::map<std::size_t, std::vector<TemplateId>> buckets_;
};

/// Thrown when the arbiter fails on a candidate; the original error is nested.
class ArbiterError : public Error {
public:
    ArbiterError(TemplateId candidate, const std::string& what)
        : Error("arbiter failed on candidate " + to_string(candidate) + ": " + what), candidate_(candidate) {}
    TemplateId candidate() const { return candidate_; }

private:
    TemplateId candidate_;
};

using Arbiter = std::function<MatchVerdict(const Template& candidate, double similarity)>;

struct GlobalMatchOptions {
    /// Examine at most this many bucket entries (in priority order).
    std::optional<std::size_t> top_k;
    /// Candidates below this similarity are skipped without consulting the arbiter.
    double threshold = 0.5;
    /// Candidates for which this returns true are skipped.
    std::function<bool(TemplateId)> skip;
};

struct PoolMatch {
    TemplateId id;
    TokenList merged;
    double similarity = 0.0;
};

/// Scans the log's length bucket in priority order and returns the first
/// candidate the arbiter accepts.
std::optional<PoolMatch> global_match(const TemplatePool& pool, const TokenSeq& log, const Arbiter& arbiter,
                                      const GlobalMatchOptions& options = {});

}  // namespace bdparse::ptmp
