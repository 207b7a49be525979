#include <gtest/gtest.h>

#include <random>

#include "tdl/eval.hpp"
#include "tdl/lowerbound.hpp"
#include "tdl/types.hpp"

using namespace tdl;

namespace {

// forest from a parent array (parent[v] < v or -1), all red
Structure forest(const std::vector<int>& par) {
  Structure F(lower_sig(), static_cast<int>(par.size()));
  for (size_t v = 0; v < par.size(); ++v) {
    if (par[v] >= 0) F.add(0, {par[v], static_cast<int>(v)});
    F.add(1, {static_cast<int>(v)});
  }
  return F;
}

bool num_equal(const Structure& F, int a, int b) {
  return canonical_form(num(subtree(F, a))) == canonical_form(num(subtree(F, b)));
}

}  // namespace

TEST(Lower, Encodings) {
  EXPECT_EQ(enc(0).n, 1);
  EXPECT_EQ(enc(1).n, 2);
  EXPECT_EQ(enc(5).n, 5);
  EXPECT_EQ(forest_height(enc(5)), 4);
  for (uint64_t n : {0, 1, 2, 3, 5, 7, 12, 16, 100, 65535}) EXPECT_EQ(decode(enc(n)), n);
  EXPECT_EQ(canonical_form(num(enc(11))), canonical_form(enc(11)));
  // root with two enc(1) children reduces to enc(2)
  Structure T = forest({-1, 0, 1, 0, 3});
  EXPECT_THROW(decode(T), DomainError);
  EXPECT_EQ(canonical_form(num(T)), canonical_form(enc(2)));
  EXPECT_EQ(decode(num(T)), 2u);
  EXPECT_EQ(canonical_form(num(num(T))), canonical_form(num(T)));
  EXPECT_THROW(num(forest({-1, -1})), InputError);
}

TEST(Lower, Tower) {
  EXPECT_EQ(tower(0), 0u);
  EXPECT_EQ(tower(1), 1u);
  EXPECT_EQ(tower(2), 2u);
  EXPECT_EQ(tower(3), 4u);
  EXPECT_EQ(tower(4), 16u);
  EXPECT_EQ(tower(5), 65536u);
  EXPECT_THROW(tower(6), DomainError);
  for (int d = 1; d <= 4; ++d)
    for (uint64_t i = 0; i < std::min<uint64_t>(tower(d), 64); ++i) EXPECT_LE(forest_height(enc(i)), d);
  EXPECT_EQ(forest_height(enc(4)), 4);
}

TEST(Lower, EqExamples) {
  Fresh fr;
  Formula e3 = build_eq(3, "x", "y", fr);
  Evaluator ev(e3);
  Structure F = disjoint_union(disjoint_union(enc(3), enc(3)), disjoint_union(enc(1), enc(2)));
  auto roots = forest_roots(F);
  ASSERT_EQ(roots.size(), 4u);
  auto at = [&](int a, int b) { return ev.eval(F, Env{{{"x", roots[a]}, {"y", roots[b]}}, {}}); };
  EXPECT_TRUE(at(0, 1));
  EXPECT_FALSE(at(2, 3));
  EXPECT_FALSE(at(0, 2));
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(at(i, i));
}

TEST(Lower, EqAgreesWithNum) {
  for (int d = 1; d <= 3; ++d) {
    Fresh fr;
    Evaluator lin(build_eq(d, "x", "y", fr));
    Evaluator nai(build_eq(d, "x", "y", fr, EqVariant::Naive));
    // number encodings: all pairs
    std::vector<Structure> encs;
    for (uint64_t i = 0; i < tower(d); ++i) encs.push_back(enc(i));
    for (size_t i = 0; i < encs.size(); ++i)
      for (size_t j = 0; j < encs.size(); ++j) {
        Structure F = disjoint_union(encs[i], encs[j]);
        Env env{{{"x", 0}, {"y", encs[i].n}}, {}};
        EXPECT_EQ(lin.eval(F, env), i == j);
        EXPECT_EQ(nai.eval(F, env), i == j);
      }
    // general forests: exhaustive up to 6 nodes, sampled at 7 and 8
    auto check = [&](const std::vector<int>& par) {
      Structure F = forest(par);
      if (forest_height(F) > d) return;
      auto roots = forest_roots(F);
      for (int a : roots)
        for (int b : roots) {
          Env env{{{"x", a}, {"y", b}}, {}};
          bool want = num_equal(F, a, b);
          ASSERT_EQ(lin.eval(F, env), want) << to_text(F);
          ASSERT_EQ(nai.eval(F, env), want) << to_text(F);
        }
    };
    for (int n = 1; n <= 6; ++n) {
      std::vector<int> par(n, -1);
      std::function<void(int)> rec = [&](int v) {
        if (v == n) return check(par);
        for (int p = -1; p < v; ++p) {
          par[v] = p;
          rec(v + 1);
        }
      };
      rec(1);
    }
    std::mt19937 rng(17 + d);
    for (int s = 0; s < 150; ++s) {
      int n = 7 + s % 2;
      std::vector<int> par(n, -1);
      for (int v = 1; v < n; ++v) par[v] = static_cast<int>(rng() % (v + 1)) - 1;
      check(par);
    }
  }
}

TEST(Lower, EqSizeLinear) {
  std::vector<uint64_t> sz;
  for (int d = 1; d <= 5; ++d) {
    Fresh fr;
    sz.push_back(formula_size(build_eq(d, "x", "y", fr)));
  }
  for (size_t i = 2; i < sz.size(); ++i) EXPECT_EQ(sz[i] - sz[i - 1], sz[2] - sz[1]) << i;
  std::vector<double> nv;
  for (int d = 1; d <= 6; ++d) {
    Fresh fr;
    nv.push_back(static_cast<double>(formula_size(build_eq(d, "x", "y", fr, EqVariant::Naive))));
  }
  for (size_t i = 3; i < nv.size(); ++i) EXPECT_GT(nv[i] - nv[i - 1], 1.9 * (nv[i - 1] - nv[i - 2])) << i;
}

TEST(Lower, Family) {
  EXPECT_EQ(build_family(1, 0).n, 1);
  Structure F20 = build_family(2, 0);
  EXPECT_EQ(F20.n, 3);
  EXPECT_EQ(forest_roots(F20).size(), 2u);
  Structure T2 = build_witness_tree(2);
  EXPECT_EQ(T2.n, 2);
  EXPECT_EQ(forest_height(T2), 2);
  EXPECT_EQ(build_witness_tree(3).n, 13);
  EXPECT_EQ(build_family(3, 2).n, 10 + 26);
  EXPECT_THROW(build_family(4, 0), BudgetError);
  for (int d = 1; d <= 3; ++d) {
    Structure T = build_witness_tree(d);
    EXPECT_LE(forest_height(T), d);
    for (uint64_t i = 0; i < tower(d); ++i) EXPECT_TRUE(embeds_at_root(enc(i), T)) << d << " " << i;
  }
  EXPECT_FALSE(embeds_at_root(enc(4), build_witness_tree(3)));
}

TEST(Lower, PhiCountsWitnessTrees) {
  Formula p1 = build_phi_lower(1);
  EXPECT_EQ(logic_of(p1), Logic::MSO);
  for (int n = 0; n <= 3; ++n) EXPECT_EQ(eval(build_family(1, n), p1), n >= 1) << n;
  Formula p2 = build_phi_lower(2);
  for (int n = 0; n <= 3; ++n) EXPECT_EQ(eval(build_family(2, n), p2), n >= 2) << n;
  // no red trees: nothing to match
  EXPECT_TRUE(eval(Structure(lower_sig(), 0), p2));
  EXPECT_TRUE(eval(build_witness_tree(2), p2));
}

TEST(Lower, PhiSizeLinear) {
  std::vector<uint64_t> sz;
  for (int d = 1; d <= 5; ++d) sz.push_back(formula_size(build_phi_lower(d)));
  for (size_t i = 2; i < sz.size(); ++i) EXPECT_EQ(sz[i] - sz[i - 1], sz[2] - sz[1]) << i;
}

TEST(Lower, FOCannotCountWitnessTrees) {
  for (int q = 0; q <= 2; ++q)
    for (int k = q; k <= 3; ++k)
      EXPECT_EQ(tp(Logic::FO, q, build_family(2, k)), tp(Logic::FO, q, build_family(2, k + 1))) << q << " " << k;
  // q = 2 still separates 0 copies from 1
  EXPECT_NE(tp(Logic::FO, 2, build_family(2, 0)), tp(Logic::FO, 2, build_family(2, 1)));
}
