#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "svtakit/error.hpp"
#include "svtakit/trees.hpp"

using namespace svtakit;
using namespace svtakit::testing;

TEST(Alphabet, RejectsBadSymbols) {
  EXPECT_EQ(code_of([] { Alphabet({}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { Alphabet({"a", "a"}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { Alphabet({"*"}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { Alphabet({"a b"}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { Alphabet({"(a"}); }), Errc::InvalidArgument);
  Alphabet ok({"NP", "x1", "a"});
  EXPECT_EQ(ok.index_of("a"), 2);
  EXPECT_EQ(code_of([&] { ok.index_of("b"); }), Errc::UnknownSymbol);
}

TEST(ParseTree, SingleLeaf) {
  const Alphabet ab = letters(3);
  Tree t = parse_tree("a", ab);
  EXPECT_TRUE(t.is_leaf());
  EXPECT_EQ(t.symbol(), 0);
  EXPECT_EQ(t.size(), 0);
}

TEST(ParseTree, NestedTree) {
  const Alphabet ab = letters(3);
  Tree t = parse_tree("((a b) c)", ab);
  EXPECT_EQ(t.size(), 2);
  EXPECT_EQ(t.yield(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(t, Tree::node(Tree::node(Tree::leaf(0), Tree::leaf(1)), Tree::leaf(2)));
  EXPECT_EQ(to_string(t, ab), "((a b) c)");
  EXPECT_EQ(parse_tree("  ( ( a  b )c ) ", ab), t);
}

TEST(ParseTree, Errors) {
  const Alphabet ab = letters(2);
  EXPECT_EQ(code_of([&] { parse_tree("(a", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree("(a b c)", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree("(a)", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree("", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree("a b", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree(")", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree("(a *)", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_tree("(a z)", ab); }), Errc::UnknownSymbol);
}

TEST(ParseContext, ExactlyOneHole) {
  const Alphabet ab = letters(2);
  Context c = parse_context("(* b)", ab);
  EXPECT_EQ(c.size(), 1);
  EXPECT_EQ(c.drop(), 1);
  EXPECT_EQ(to_string(c, ab), "(* b)");
  EXPECT_EQ(parse_context("*", ab), Context::hole());
  EXPECT_EQ(code_of([&] { parse_context("(a b)", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { parse_context("(* *)", ab); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([&] { Context(parse_tree("a", ab)); }), Errc::InvalidArgument);
}

TEST(Substitute, IdentityContext) {
  const Alphabet ab = letters(2);
  Tree t = parse_tree("((a b) a)", ab);
  EXPECT_EQ(substitute(Context::hole(), t), t);
}

TEST(Substitute, DirectReplacement) {
  const Alphabet ab = letters(2);
  EXPECT_EQ(substitute(parse_context("(* b)", ab), parse_tree("(a a)", ab)), parse_tree("((a a) b)", ab));
}

TEST(Substitute, NestedContextComposition) {
  const Alphabet abcd = letters(4);
  const Tree t = parse_tree("(c c)", abcd);
  const Context c1 = parse_context("(* d)", abcd);
  const Context c2 = parse_context("(a *)", abcd);
  const Tree c1t = substitute(c1, t);
  EXPECT_EQ(to_string(c1t, abcd), "((c c) d)");
  EXPECT_EQ(c1t.size(), 2);
  EXPECT_EQ(c1t.depth(), 2);
  EXPECT_EQ(t.yield(), (std::vector<int>{2, 2}));
  const Context c21 = compose(c2, c1);
  EXPECT_EQ(c21.drop(), 2);
  EXPECT_EQ(substitute(c21, t), substitute(c2, substitute(c1, t)));
}

TEST(Enumerate, SingleLeaf) {
  auto trees = enumerate_trees(letters(1), 0);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(trees[0], Tree::leaf(0));
}

TEST(Enumerate, TwoSymbolsSizeOne) {
  auto trees = enumerate_trees(letters(2), 1);
  EXPECT_EQ(trees.size(), 6u);
  EXPECT_EQ(std::count_if(trees.begin(), trees.end(), [](const Tree& t) { return t.size() == 1; }), 4);
}

TEST(Enumerate, CatalanCountsAndOrder) {
  for (int s = 1; s <= 3; ++s) {
    const Alphabet ab = letters(s);
    const int max = s == 1 ? 8 : (s == 2 ? 5 : 4);
    auto by_size = enumerate_trees_by_size(ab, max);
    for (int m = 0; m <= max; ++m) {
      long long expected = catalan(m);
      for (int k = 0; k <= m; ++k) expected *= s;
      EXPECT_EQ(static_cast<long long>(by_size[static_cast<std::size_t>(m)].size()), expected) << "size " << m;
    }
    auto flat = enumerate_trees(ab, max);
    EXPECT_TRUE(std::is_sorted(flat.begin(), flat.end()));
    EXPECT_EQ(std::adjacent_find(flat.begin(), flat.end()), flat.end());
  }
  auto one = enumerate_trees_by_size(letters(1), 4);
  std::vector<std::size_t> counts;
  for (int m = 1; m <= 4; ++m) counts.push_back(one[static_cast<std::size_t>(m)].size());
  EXPECT_EQ(counts, (std::vector<std::size_t>{1, 2, 5, 14}));
}

TEST(Enumerate, ContextsSmall) {
  auto c0 = enumerate_contexts(letters(1), 0);
  ASSERT_EQ(c0.size(), 1u);
  EXPECT_EQ(c0[0], Context::hole());
  auto c1 = enumerate_contexts(letters(1), 1);
  ASSERT_EQ(c1.size(), 3u);
  std::set<std::string> size_one;
  for (const auto& c : c1) {
    if (c.size() == 1) size_one.insert(to_string(c, letters(1)));
  }
  EXPECT_EQ(size_one, (std::set<std::string>{"(* a)", "(a *)"}));
}

TEST(Enumerate, ContextCounts) {
  const Alphabet ab = letters(2);
  auto ctx = enumerate_contexts(ab, 4);
  std::map<int, long long> per_size;
  std::set<std::string> seen;
  for (const auto& c : ctx) {
    ++per_size[c.size()];
    EXPECT_EQ(c.shape().hole_count(), 1);
    EXPECT_TRUE(seen.insert(to_string(c, ab)).second);
  }
  EXPECT_EQ(per_size[2], 24);
  for (int m = 0; m <= 4; ++m) {
    long long expected = (m + 1) * catalan(m);
    for (int k = 0; k < m; ++k) expected *= 2;
    EXPECT_EQ(per_size[m], expected) << "size " << m;
  }
  EXPECT_TRUE(std::is_sorted(ctx.begin(), ctx.end()));
}

TEST(Enumerate, CapExceeded) {
  EXPECT_EQ(code_of([] { enumerate_trees(letters(1), 11); }), Errc::CapExceeded);
  EXPECT_EQ(code_of([] { enumerate_contexts(letters(1), 11); }), Errc::CapExceeded);
  long long total = 0;
  for (int m = 0; m <= 11; ++m) total += catalan(m);
  EXPECT_EQ(static_cast<long long>(enumerate_trees(letters(1), 11, 11).size()), total);
}

TEST(Invariants, SubstitutionSizeAndDepth) {
  for (int s : {1, 2}) {
    const Alphabet ab = letters(s);
    const int max = s == 1 ? 6 : 4;
    auto ctx = enumerate_contexts(ab, max);
    auto trees = enumerate_trees(ab, max);
    for (const auto& c : ctx) {
      for (const auto& t : trees) {
        if (c.size() + t.size() > max) continue;
        const Tree ct = substitute(c, t);
        ASSERT_EQ(ct.size(), c.size() + t.size());
        ASSERT_EQ(ct.depth(), naive_depth(ct));
        ASSERT_GE(ct.depth(), c.drop() + t.depth());
        ASSERT_EQ(ct.leaf_count(), static_cast<int>(ct.yield().size()));
      }
    }
  }
}

TEST(Invariants, FactorizationCount) {
  for (int s : {1, 2}) {
    const Alphabet ab = letters(s);
    const int max = s == 1 ? 6 : 4;
    auto ctx = enumerate_contexts(ab, max);
    auto trees = enumerate_trees(ab, max);
    std::map<std::string, int> splits;
    for (const auto& c : ctx)
      for (const auto& t : trees) {
        if (c.size() + t.size() <= max) ++splits[to_string(substitute(c, t), ab)];
      }
    for (const auto& t : trees) {
      EXPECT_EQ(splits[to_string(t, ab)], t.node_count()) << to_string(t, ab);
    }
  }
}

TEST(Invariants, RoundTrip) {
  const Alphabet ab({"a", "bb", "c#"});
  for (const auto& t : enumerate_trees(ab, 4)) {
    ASSERT_EQ(parse_tree(to_string(t, ab), ab), t);
  }
  for (const auto& c : enumerate_contexts(letters(2), 4)) {
    ASSERT_EQ(parse_context(to_string(c, letters(2)), letters(2)), c);
  }
}

TEST(Corpus, SkipsCommentsAndBlanks) {
  std::istringstream in("# header\n\n(a b)\n  # indented comment\na\n");
  auto trees = read_tree_corpus(in, letters(2));
  ASSERT_EQ(trees.size(), 2u);
  EXPECT_EQ(trees[1], Tree::leaf(0));
}
