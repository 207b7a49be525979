#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/treedepth.hpp"

using namespace tdl;
using namespace tdl::testing;

TEST(TreeDepth, Examples) {
  EXPECT_EQ(tree_depth(Structure(graph_sig(), 1)), 1);
  EXPECT_EQ(tree_depth(path(4)), 3);
  EXPECT_EQ(tree_depth(star(3)), 2);
  EXPECT_EQ(tree_depth(path(7)), 3);
  EXPECT_EQ(tree_depth(path(8)), 4);
  EXPECT_EQ(tree_depth(clique(5)), 5);
  EXPECT_EQ(tree_depth(cycle(5)), 4);
  EXPECT_EQ(tree_depth(disjoint_union(path(4), clique(4))), 4);
}

TEST(TreeDepth, Roots) {
  EXPECT_EQ(roots_of(path(3)), std::vector<int>{1});
  EXPECT_EQ(roots_of(path(2)), (std::vector<int>{0, 1}));
  EXPECT_EQ(roots_of(path(4)), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(roots_of(Structure(graph_sig(), 1)), std::vector<int>{0});
  EXPECT_THROW(roots_of(Structure(graph_sig(), 2)), DomainError);
}

TEST(TreeDepth, MaxOverComponentsAndNoLongPaths) {
  EnumOptions opt;
  opt.max_size = 7;
  opt.graph_mode = true;
  for (auto& A : enum_structures(graph_sig(), opt)) {
    int m = 0;
    for (auto& c : components(A)) m = std::max(m, tree_depth(c.s));
    EXPECT_EQ(tree_depth(A), m);
  }
  // td <= d excludes paths with 2^d edges (2^d + 1 vertices)
  for (int d = 1; d <= 3; ++d) {
    int len = 1 << d;
    EnumOptions o;
    o.max_size = std::min(8, len + 1);
    o.min_size = o.max_size;
    o.graph_mode = true;
    o.td = d;
    if (len + 1 > 8) continue;
    for (auto& A : enum_structures(graph_sig(), o)) {
      // look for a Hamiltonian path through all len+1 vertices
      std::vector<int> perm(A.n);
      for (int i = 0; i < A.n; ++i) perm[i] = i;
      bool found = false;
      do {
        bool ok = true;
        for (int i = 0; i + 1 < A.n && ok; ++i) ok = A.holds(0, {perm[i], perm[i + 1]});
        found = ok;
      } while (!found && std::next_permutation(perm.begin(), perm.end()));
      EXPECT_FALSE(found) << to_text(A);
    }
  }
}

TEST(Enumerate, Counts) {
  EnumOptions opt;
  opt.min_size = 3;
  opt.max_size = 3;
  opt.graph_mode = true;
  EXPECT_EQ(enum_structures(graph_sig(), opt).size(), 4u);
  opt.td = 1;
  opt.min_size = 0;
  opt.max_size = 5;
  for (auto& A : enum_structures(graph_sig(), opt)) EXPECT_EQ(A.tuple_count(), 0);
  EnumOptions c;
  c.min_size = 1;
  c.max_size = 1;
  c.connected = true;
  EXPECT_EQ(enum_structures(Signature({{"E", 2}, {"R", 1}}), c).size(), 4u);
  EXPECT_EQ(enum_structures(Signature({{"E", 2}}), c).size(), 2u);
  // unlabelled directed graphs with loops on 2 vertices: 10
  EnumOptions d;
  d.min_size = 2;
  d.max_size = 2;
  EXPECT_EQ(enum_structures(Signature({{"E", 2}}), d).size(), 10u);
  // connected graphs up to 6 vertices: 1,1,2,6,21,112
  EnumOptions cg;
  cg.min_size = 1;
  cg.max_size = 6;
  cg.graph_mode = true;
  cg.connected = true;
  EXPECT_EQ(enum_structures(graph_sig(), cg).size(), 1u + 1 + 2 + 6 + 21 + 112);
}

TEST(Enumerate, DedupAndCoverage) {
  EnumOptions opt;
  opt.max_size = 4;
  Signature s({{"E", 2}, {"R", 1}});
  auto all = enum_structures(s, opt);
  std::set<std::string> forms;
  int last = 0;
  for (auto& A : all) {
    EXPECT_TRUE(forms.insert(canonical_form(A)).second);
    EXPECT_GE(A.n, last);
    last = A.n;
  }
  std::mt19937 rng(7);
  for (int it = 0; it < 50; ++it) {
    int n = 1 + rng() % 4;
    Structure A(s, n);
    for (int a = 0; a < n; ++a) {
      if (rng() % 2) A.add(1, {a});
      for (int b = 0; b < n; ++b)
        if (rng() % 3 == 0) A.add(0, {a, b});
    }
    EXPECT_TRUE(forms.count(canonical_form(A)));
  }
}

TEST(Enumerate, Orders) {
  EXPECT_EQ(all_orders(Structure(graph_sig(), 2)).size(), 2u);
  EXPECT_EQ(all_orders(Structure(graph_sig(), 0)).size(), 1u);
  auto o3 = all_orders(Structure(graph_sig(), 3));
  ASSERT_EQ(o3.size(), 6u);
  EXPECT_EQ(*o3[0].order, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(*o3[1].order, (std::vector<int>{0, 2, 1}));
  EXPECT_EQ(*o3[5].order, (std::vector<int>{2, 1, 0}));
}
