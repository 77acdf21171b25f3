#include <gtest/gtest.h>

#include <map>
#include <random>

#include "bdparse/bdpt.hpp"
#include "bdparse/errors.hpp"
#include "helpers.hpp"

using namespace bdparse;
using bdpt::Direction;
using bdpt::ParseTree;
using bdparse::testing::seq;
using bdparse::testing::tokens;

namespace {
bool group_has(const bdpt::TemplateGroup* g, std::uint64_t id) {
    return g && std::find(g->begin(), g->end(), TemplateId{id}) != g->end();
}
}  // namespace

TEST(BranchDepth, ClosedForm) {
    EXPECT_EQ(bdpt::branch_depth(4), 3u);
    EXPECT_EQ(bdpt::branch_depth(1), 1u);
    EXPECT_EQ(bdpt::branch_depth(7), 4u);
    EXPECT_THROW(bdpt::branch_depth(0), PreconditionError);
}

TEST(ParseTree, InsertBuildsForwardAndReversedBranches) {
    ParseTree tree;
    tree.insert(TemplateId{1}, tokens("eth0 send <*> packages"));
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::forward), (std::vector<std::string>{"eth0", "send", "<*>"}));
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::reverse), (std::vector<std::string>{"packages", "<*>", "send"}));
}

TEST(ParseTree, SingleTokenTemplateHasIdenticalBranches) {
    ParseTree tree;
    tree.insert(TemplateId{1}, tokens("ready"));
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::forward), (std::vector<std::string>{"ready"}));
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::reverse), (std::vector<std::string>{"ready"}));
}

TEST(ParseTree, SharedPrefixSharesForwardGroup) {
    ParseTree tree;
    tree.insert(TemplateId{1}, tokens("a b c x"));
    tree.insert(TemplateId{2}, tokens("a b c y"));
    const auto* g = tree.descend(Direction::forward, seq("a b c z"));
    EXPECT_TRUE(group_has(g, 1));
    EXPECT_TRUE(group_has(g, 2));
}

TEST(ParseTree, DescendFindsOnlyTheReverseBranchForAChangedFirstToken) {
    ParseTree tree;
    tree.insert(TemplateId{1}, tokens("eth0 send <*> packages"));
    EXPECT_EQ(tree.descend(Direction::forward, seq("eth1 send <*> packages")), nullptr);
    EXPECT_TRUE(group_has(tree.descend(Direction::reverse, seq("eth1 send <*> packages")), 1));
    EXPECT_EQ(tree.descend(Direction::forward, seq("eth0 send")), nullptr);
}

TEST(ParseTree, UpdateAddsWildcardAndObsoletesOldBranch) {
    ParseTree tree;
    const auto old_tokens = tokens("eth0 send <*> packages");
    tree.insert(TemplateId{1}, old_tokens);
    tree.apply_update(TemplateId{1}, old_tokens, tokens("<*> send <*> packages"));
    EXPECT_EQ(tree.obsolete_count(), 1u);
    EXPECT_TRUE(group_has(tree.descend(Direction::forward, seq("eth7 send <*> packages")), 1));
    EXPECT_TRUE(group_has(tree.descend(Direction::forward, seq("eth0 send <*> packages")), 1));
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::forward), (std::vector<std::string>{"<*>", "send", "<*>"}));
    tree.check_invariants();
}

TEST(ParseTree, UpdateOutsideBranchDepthLeavesThatDirectionAlone) {
    ParseTree tree;
    const auto old_tokens = tokens("a b c d e f g");
    tree.insert(TemplateId{1}, old_tokens);
    const auto before = tree.branch_of(TemplateId{1}, Direction::forward);
    tree.apply_update(TemplateId{1}, old_tokens, tokens("a b c d e f <*>"));
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::forward), before);
    EXPECT_EQ(tree.branch_of(TemplateId{1}, Direction::reverse).front(), "<*>");
}

TEST(ParseTree, ReapplyingAnUpdateChangesNothing) {
    ParseTree tree;
    const auto a = tokens("eth0 send <*> packages");
    const auto b = tokens("<*> send <*> packages");
    tree.insert(TemplateId{1}, a);
    tree.apply_update(TemplateId{1}, a, b);
    const auto rendering = tree.render();
    tree.apply_update(TemplateId{1}, b, b);
    EXPECT_EQ(tree.render(), rendering);
}

TEST(ParseTree, UnknownTemplateUpdateIsConsistencyError) {
    ParseTree tree;
    EXPECT_THROW(tree.apply_update(TemplateId{3}, tokens("a"), tokens("<*>")), ConsistencyError);
}

TEST(ParseTree, ReinsertIsNoOp) {
    ParseTree tree;
    tree.insert(TemplateId{1}, tokens("a b"));
    const auto nodes = tree.node_count();
    tree.insert(TemplateId{1}, tokens("a b"));
    EXPECT_EQ(tree.node_count(), nodes);
    EXPECT_EQ(tree.template_count(), 1u);
}

TEST(ParseTree, PromotionKeepsSiblingTemplatesReachable) {
    ParseTree tree;
    const auto a = tokens("x send <*> packages");
    tree.insert(TemplateId{1}, a);
    tree.insert(TemplateId{2}, tokens("y recv <*> packages"));
    tree.apply_update(TemplateId{1}, a, tokens("<*> send <*> packages"));
    EXPECT_TRUE(group_has(tree.descend(Direction::forward, tokens("y recv <*> packages")), 2));
    tree.check_invariants();
}

TEST(ParseTree, RenderingIsDeterministic) {
    ParseTree a, b;
    for (auto* t : {&a, &b}) {
        t->insert(TemplateId{1}, tokens("b a"));
        t->insert(TemplateId{2}, tokens("a b"));
    }
    EXPECT_EQ(a.render(), b.render());
    EXPECT_NE(a.render().find("len=2"), std::string::npos);
}

// Random inserts and generalizing updates; every template must stay reachable
// through its own tokens in both directions.
TEST(ParseTree, RandomHistoriesKeepEveryTemplateReachable) {
    std::mt19937 rng(77);
    const std::vector<std::string> words{"a", "b", "c", "d"};
    for (int trial = 0; trial < 60; ++trial) {
        ParseTree tree;
        std::map<std::uint64_t, TokenList> live;
        std::uint64_t next = 1;
        for (int step = 0; step < 80; ++step) {
            if (live.empty() || rng() % 3 == 0) {
                const auto n = 1 + rng() % 6;
                TokenList t;
                for (std::size_t i = 0; i < n; ++i) t.push_back(TemplateToken::constant(words[rng() % words.size()]));
                tree.insert(TemplateId{next}, t);
                live.emplace(next++, t);
            } else {
                auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
                TokenList updated = it->second;
                updated[rng() % updated.size()] = TemplateToken::wildcard();
                tree.apply_update(TemplateId{it->first}, it->second, updated);
                it->second = updated;
            }
        }
        tree.check_invariants();
        for (const auto& [id, toks] : live) {
            for (auto dir : {Direction::forward, Direction::reverse}) {
                ASSERT_TRUE(group_has(tree.descend(dir, toks), id)) << "trial " << trial << " id " << id;
            }
        }
    }
}
