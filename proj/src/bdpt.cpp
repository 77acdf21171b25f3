#include "bdparse/bdpt.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "bdparse/errors.hpp"

namespace bdparse::bdpt {

struct ParseTree::Node {
    std::string token;
    bool wildcard = false;
    bool obsolete = false;
    std::map<std::string, std::unique_ptr<Node>, std::less<>> children;
    std::unique_ptr<Node> wildcard_child;
    TemplateGroup group;

    std::string_view label() const { return wildcard ? kPlaceholder : std::string_view{token}; }
};

struct ParseTree::LengthNode {
    Node forward;
    Node reverse;
};

namespace {

std::size_t position(Direction dir, std::size_t level, std::size_t n) {
    return dir == Direction::forward ? level : n - 1 - level;
}

void add_to_group(TemplateGroup& group, TemplateId id) {
    auto it = std::lower_bound(group.begin(), group.end(), id);
    if (it == group.end() || *it != id) group.insert(it, id);
}

bool remove_from_group(TemplateGroup& group, TemplateId id) {
    auto it = std::lower_bound(group.begin(), group.end(), id);
    if (it == group.end() || *it != id) return false;
    group.erase(it);
    return true;
}

struct Key {
    bool wildcard;
    std::string_view text;
};

// Strict wildcard-precedence walk shared by both descend overloads.
template <typename Node, typename KeyAt>
Node* walk(Node* node, std::size_t depth, KeyAt key_at) {
    for (std::size_t level = 0; node && level < depth; ++level) {
        if (node->wildcard_child) {
            node = node->wildcard_child.get();
            continue;
        }
        const Key key = key_at(level);
        if (key.wildcard) return nullptr;
        auto it = node->children.find(key.text);
        if (it == node->children.end() || it->second->obsolete) return nullptr;
        node = it->second.get();
    }
    return node;
}

}  // namespace

std::string_view to_string(Direction dir) { return dir == Direction::forward ? "forward" : "reverse"; }

std::size_t branch_depth(std::size_t n) {
    if (n == 0) throw PreconditionError("branch_depth: token length must be >= 1");
    return n % 2 == 1 ? (n + 1) / 2 : n / 2 + 1;
}

ParseTree::ParseTree() = default;
ParseTree::~ParseTree() = default;
ParseTree::ParseTree(ParseTree&&) noexcept = default;
ParseTree& ParseTree::operator=(ParseTree&&) noexcept = default;

ParseTree::Node& ParseTree::direction_root(std::size_t n, Direction dir) {
    auto& slot = lengths_[n];
    if (!slot) slot = std::make_unique<LengthNode>();
    return dir == Direction::forward ? slot->forward : slot->reverse;
}

const ParseTree::Node* ParseTree::direction_root(std::size_t n, Direction dir) const {
    auto it = lengths_.find(n);
    if (it == lengths_.end()) return nullptr;
    return dir == Direction::forward ? &it->second->forward : &it->second->reverse;
}

void ParseTree::insert(TemplateId id, std::span<const TemplateToken> tokens) {
    if (tokens.empty()) throw PreconditionError("insert: template must have at least one token");
    if (members_.contains(id)) return;
    members_.emplace(id, TokenList(tokens.begin(), tokens.end()));
    for (auto dir : {Direction::forward, Direction::reverse}) {
        place(direction_root(tokens.size(), dir), dir, id, tokens);
    }
}

void ParseTree::place(Node& dir_root, Direction dir, TemplateId id, std::span<const TemplateToken> tokens) {
    place_from(dir_root, 0, branch_depth(tokens.size()), dir, id, tokens);
}

void ParseTree::place_from(Node& start, std::size_t level, std::size_t depth, Direction dir, TemplateId id,
                           std::span<const TemplateToken> tokens) {
    Node* node = &start;
    for (; level < depth; ++level) {
        const auto& tok = tokens[position(dir, level, tokens.size())];
        if (!node->wildcard_child && tok.is_wildcard()) promote(*node, level, depth, dir);
        if (node->wildcard_child) {
            node = node->wildcard_child.get();
            continue;
        }
        auto [it, inserted] = node->children.try_emplace(std::string(tok.text()));
        if (inserted) {
            it->second = std::make_unique<Node>();
            it->second->token = std::string(tok.text());
        }
        node = it->second.get();
    }
    add_to_group(node->group, id);
}

void ParseTree::promote(Node& node, std::size_t level, std::size_t depth, Direction dir) {
    node.wildcard_child = std::make_unique<Node>();
    node.wildcard_child->wildcard = true;

    std::vector<TemplateId> displaced;
    std::function<void(Node&)> collect = [&](Node& n) {
        displaced.insert(displaced.end(), n.group.begin(), n.group.end());
        n.group.clear();
        if (n.wildcard_child) collect(*n.wildcard_child);
        for (auto& [_, child] : n.children) collect(*child);
    };
    for (auto& [_, child] : node.children) {
        if (child->obsolete) continue;
        collect(*child);
        child->obsolete = true;
    }
    std::sort(displaced.begin(), displaced.end());
    for (auto id : displaced) {
        const auto& tokens = members_.at(id);
        place_from(*node.wildcard_child, level + 1, depth, dir, id, tokens);
    }
}

const TemplateGroup* ParseTree::descend(Direction dir, const TokenSeq& log) const {
    if (log.length() == 0) return nullptr;
    const Node* root = direction_root(log.length(), dir);
    if (!root) return nullptr;
    const auto n = log.length();
    const Node* leaf = walk(root, branch_depth(n), [&](std::size_t level) {
        const auto p = position(dir, level, n);
        return Key{log.is_wildcard(p), log.tokens[p]};
    });
    return leaf ? &leaf->group : nullptr;
}

const TemplateGroup* ParseTree::descend(Direction dir, std::span<const TemplateToken> tokens) const {
    if (tokens.empty()) return nullptr;
    const Node* root = direction_root(tokens.size(), dir);
    if (!root) return nullptr;
    const auto n = tokens.size();
    const Node* leaf = walk(root, branch_depth(n), [&](std::size_t level) {
        const auto& t = tokens[position(dir, level, n)];
        return Key{t.is_wildcard(), t.text()};
    });
    return leaf ? &leaf->group : nullptr;
}

ParseTree::Node* ParseTree::leaf_for(Direction dir, std::span<const TemplateToken> tokens) {
    auto it = lengths_.find(tokens.size());
    if (it == lengths_.end()) return nullptr;
    Node* root = dir == Direction::forward ? &it->second->forward : &it->second->reverse;
    const auto n = tokens.size();
    return walk(root, branch_depth(n), [&](std::size_t level) {
        const auto& t = tokens[position(dir, level, n)];
        return Key{t.is_wildcard(), t.text()};
    });
}

void ParseTree::apply_update(TemplateId id, std::span<const TemplateToken> old_tokens,
                             std::span<const TemplateToken> new_tokens) {
    auto member = members_.find(id);
    if (member == members_.end()) {
        throw ConsistencyError("apply_update: template " + to_string(id) + " is not in the tree");
    }
    if (old_tokens.size() != new_tokens.size()) {
        throw PreconditionError("apply_update: token length changed for " + to_string(id));
    }
    if (std::equal(old_tokens.begin(), old_tokens.end(), new_tokens.begin(), new_tokens.end())) return;

    for (auto dir : {Direction::forward, Direction::reverse}) {
        Node* leaf = leaf_for(dir, old_tokens);
        if (!leaf || !remove_from_group(leaf->group, id)) {
            throw ConsistencyError("apply_update: template " + to_string(id) + " unreachable in " +
                                   std::string(to_string(dir)) + " direction");
        }
    }
    member->second.assign(new_tokens.begin(), new_tokens.end());
    for (auto dir : {Direction::forward, Direction::reverse}) {
        place(direction_root(new_tokens.size(), dir), dir, id, new_tokens);
    }
}

std::vector<std::string> ParseTree::branch_of(TemplateId id, Direction dir) const {
    auto member = members_.find(id);
    if (member == members_.end()) return {};
    const auto& tokens = member->second;
    const Node* node = direction_root(tokens.size(), dir);
    std::vector<std::string> labels;
    const auto depth = branch_depth(tokens.size());
    for (std::size_t level = 0; node && level < depth; ++level) {
        if (node->wildcard_child) {
            node = node->wildcard_child.get();
        } else {
            auto it = node->children.find(tokens[position(dir, level, tokens.size())].text());
            node = it == node->children.end() ? nullptr : it->second.get();
        }
        if (node) labels.emplace_back(node->label());
    }
    return labels;
}

namespace {

template <typename Fn>
void visit(const auto& node, Fn&& fn) {
    fn(node);
    if (node.wildcard_child) visit(*node.wildcard_child, fn);
    for (const auto& [_, child] : node.children) visit(*child, fn);
}

}  // namespace

std::size_t ParseTree::node_count() const {
    std::size_t count = 1;  // root
    for (const auto& [_, len] : lengths_) {
        ++count;
        visit(len->forward, [&](const Node&) { ++count; });
        visit(len->reverse, [&](const Node&) { ++count; });
    }
    return count;
}

std::size_t ParseTree::obsolete_count() const {
    std::size_t count = 0;
    for (const auto& [_, len] : lengths_) {
        auto tally = [&](const Node& n) { count += n.obsolete ? 1 : 0; };
        visit(len->forward, tally);
        visit(len->reverse, tally);
    }
    return count;
}

void ParseTree::check_invariants() const {
    for (const auto& [id, tokens] : members_) {
        for (auto dir : {Direction::forward, Direction::reverse}) {
            const auto* group = descend(dir, tokens);
            if (!group || !std::binary_search(group->begin(), group->end(), id)) {
                throw ConsistencyError("template " + to_string(id) + " unreachable in " +
                                       std::string(to_string(dir)) + " direction");
            }
        }
    }
    for (const auto& [n, len] : lengths_) {
        const auto depth = branch_depth(n);
        std::function<void(const Node&, std::size_t)> check = [&](const Node& node, std::size_t level) {
            const bool leaf = !node.wildcard_child && node.children.empty();
            if (leaf && level != depth && level != 0) {
                throw ConsistencyError("branch of length " + std::to_string(n) + " ends at level " +
                                       std::to_string(level) + ", expected " + std::to_string(depth));
            }
            if (!node.group.empty() && level != depth) {
                throw ConsistencyError("template group above leaf level for length " + std::to_string(n));
            }
            if (node.wildcard_child) check(*node.wildcard_child, level + 1);
            for (const auto& [_, child] : node.children) check(*child, level + 1);
        };
        check(len->forward, 0);
        check(len->reverse, 0);
    }
}

std::string ParseTree::render() const {
    std::ostringstream out;
    out << "root\n";
    std::function<void(const Node&, std::size_t)> emit = [&](const Node& node, std::size_t depth) {
        out << std::string(depth * 2, ' ') << node.label();
        if (node.obsolete) out << " [obsolete]";
        if (!node.wildcard_child && node.children.empty()) out << " [group=" << node.group.size() << "]";
        out << '\n';
        if (node.wildcard_child) emit(*node.wildcard_child, depth + 1);
        for (const auto& [_, child] : node.children) emit(*child, depth + 1);
    };
    for (const auto& [n, len] : lengths_) {
        out << "  len=" << n << '\n';
        for (auto dir : {Direction::forward, Direction::reverse}) {
            out << "    " << to_string(dir) << '\n';
            const Node& root = dir == Direction::forward ? len->forward : len->reverse;
            if (root.wildcard_child) emit(*root.wildcard_child, 3);
            for (const auto& [_, child] : root.children) emit(*child, 3);
        }
    }
    return out.str();
}

}  // namespace bdparse::bdpt
