#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bdparse/model.hpp"

namespace bdparse::bdpt {

enum class Direction { forward, reverse };

std::string_view to_string(Direction dir);

/// Number of token levels per branch for a message of `n` tokens:
/// (n+1)/2 for odd n, n/2+1 for even n. Throws PreconditionError for n == 0.
std::size_t branch_depth(std::size_t n);

/// Leaf payload: ids of templates sharing length and branch path, ascending.
using TemplateGroup = std::vector<TemplateId>;

/// Five layers: root -> length -> direction -> M token levels -> template group.
///
/// A parent has at most one wildcard child and descent always prefers it.
/// When a wildcard child appears next to constant siblings, the siblings are
/// marked obsolete and every template below them is re-attached under the
/// wildcard, so each live template stays reachable by its own tokens.
class ParseTree {
public:
    ParseTree();
    ~ParseTree();
    ParseTree(ParseTree&&) noexcept;
    ParseTree& operator=(ParseTree&&) noexcept;

    /// Adds forward and reverse branches for the template. Re-inserting a known id is a no-op.
    void insert(TemplateId id, std::span<const TemplateToken> tokens);

    /// Walks M levels in the given direction. Returns nullptr when no live branch matches.
    const TemplateGroup* descend(Direction dir, const TokenSeq& log) const;
    const TemplateGroup* descend(Direction dir, std::span<const TemplateToken> tokens) const;

    /// Moves the template from the branches of `old_tokens` to those of `new_tokens`.
    /// Throws ConsistencyError if the template is not reachable through `old_tokens`.
    void apply_update(TemplateId id, std::span<const TemplateToken> old_tokens,
                      std::span<const TemplateToken> new_tokens);

    bool contains(TemplateId id) const { return members_.contains(id); }
    std::size_t template_count() const { return members_.size(); }

    /// Node labels from the direction node (exclusive) down to the template's leaf.
    std::vector<std::string> branch_of(TemplateId id, Direction dir) const;

    std::size_t node_count() const;
    std::size_t obsolete_count() const;

    /// Throws ConsistencyError if a live template is unreachable in either
    /// direction or a branch has the wrong depth.
    void check_invariants() const;

    /// Deterministic indented dump, one node per line.
    std::string render() const;

private:
    struct Node;
    struct LengthNode;

    Node& direction_root(std::size_t n, Direction dir);
    const Node* direction_root(std::size_t n, Direction dir) const;
    void place(Node& dir_root, Direction dir, TemplateId id, std::span<const TemplateToken> tokens);
    void place_from(Node& node, std::size_t level, std::size_t depth, Direction dir, TemplateId id,
                    std::span<const TemplateToken> tokens);
    void promote(Node& node, std::size_t level, std::size_t depth, Direction dir);
    Node* leaf_for(Direction dir, std::span<const TemplateToken> tokens);

    std::map<std::size_t, std::unique_ptr<LengthNode>> lengths_;
    std::unordered_map<TemplateId, TokenList> members_;
};

}  // namespace bdparse::bdpt
