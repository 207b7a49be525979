#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/eval.hpp"
#include "tdl/types.hpp"

using namespace tdl;
using namespace tdl::testing;

namespace {

Structure random_structure(std::mt19937& rng, const Signature& s, int n) {
  Structure A(s, n);
  for (int i = 0; i < s.size(); ++i) {
    int ar = s.symbols()[i].arity;
    int total = 1;
    for (int j = 0; j < ar; ++j) total *= n;
    for (int c = 0; c < total; ++c)
      if (rng() % 3 == 0) {
        Tuple t;
        for (int j = 0, x = c; j < ar; ++j, x /= n) t.push_back(x % n);
        A.add(i, t);
      }
  }
  return A;
}

Structure random_order(std::mt19937& rng, const Structure& A) {
  std::vector<int> o(A.n);
  for (int i = 0; i < A.n; ++i) o[i] = i;
  std::shuffle(o.begin(), o.end(), rng);
  return with_order(A, o);
}

}  // namespace

TEST(Types, EmptySignatureCounting) {
  Signature e(std::vector<Symbol>{});
  Structure one(e, 1), two(e, 2), three(e, 3);
  EXPECT_EQ(tp(Logic::FO, 1, one), tp(Logic::FO, 1, two));
  EXPECT_NE(tp(Logic::FO, 2, one), tp(Logic::FO, 2, two));
  EXPECT_EQ(tp(Logic::FO, 2, two), tp(Logic::FO, 2, three));
  EXPECT_EQ(tp(Logic::MSO, 1, one), tp(Logic::MSO, 1, two));
  EXPECT_NE(tp(Logic::MSO, 2, one), tp(Logic::MSO, 2, two));  // exists X (exists x X(x) & exists y !X(y))
  EXPECT_EQ(tp(Logic::FO, 2, path(3)), tp(Logic::FO, 2, relabel(path(3), {2, 0, 1})));
  EXPECT_THROW(tp(Logic::FO, 1, one, {}, {1}), InputError);
}

TEST(Types, Stabilization) {
  Signature e(std::vector<Symbol>{});
  Structure one(e, 1);
  EXPECT_EQ(stabilization_threshold(tp(Logic::FO, 1, one)), 1);
  EXPECT_EQ(stabilization_threshold(tp(Logic::FO, 2, one)), 2);
  EXPECT_EQ(stabilization_threshold(tp(Logic::FO, 3, one)), 3);
  // ordered singletons: linear orders of length >= 2^q - 1 agree on qr q
  auto o1 = with_order(one, {0});
  for (int q = 1; q <= 3; ++q) {
    int t = stabilization_threshold(tp(Logic::FO, q, o1));
    EXPECT_LE(t, (1 << q) + 1);
    EXPECT_EQ(t, (1 << q) - 1);
  }
  EXPECT_EQ(pumping_period({tp(Logic::MSO, 0, o1)}), 1);
}

TEST(Types, CompareIsTotalOrder) {
  EnumOptions opt;
  opt.max_size = 3;
  std::vector<TypeId> ts;
  for (auto& A : enum_structures(graph_sig(), opt)) ts.push_back(tp(Logic::FO, 2, A));
  for (auto a : ts) {
    EXPECT_EQ(type_compare(a, a), 0);
    for (auto b : ts) {
      EXPECT_EQ(type_compare(a, b), -type_compare(b, a));
      EXPECT_EQ(type_compare(a, b) == 0, a == b);
      for (auto c : ts)
        if (type_compare(a, b) < 0 && type_compare(b, c) < 0) EXPECT_LT(type_compare(a, c), 0);
    }
  }
  EXPECT_LT(atomic_compare({}, {"R"}), 0);
  EXPECT_LT(atomic_compare({"E"}, {"R"}), 0);
  EXPECT_LT(atomic_compare({"R"}, {"E", "B"}), 0);
  EXPECT_EQ(atomic_compare({"R"}, {"R"}), 0);
}

TEST(Types, ComposeMatchesUnion) {
  std::mt19937 rng(3);
  Signature s({{"E", 2}, {"R", 1}});
  for (int it = 0; it < 60; ++it) {
    auto A = random_structure(rng, s, 1 + rng() % 3), B = random_structure(rng, s, rng() % 3);
    Logic L = it % 2 ? Logic::MSO : Logic::FO;
    int q = 1 + it % 3;
    if (L == Logic::MSO) q = std::min(q, 2);
    EXPECT_EQ(compose(tp(L, q, A), tp(L, q, B)), tp(L, q, disjoint_union(A, B)));
    auto Ao = random_order(rng, A), Bo = random_order(rng, B);
    EXPECT_EQ(compose(tp(L, q, Ao), tp(L, q, Bo)), tp(L, q, ordered_sum(Ao, Bo)));
  }
  // empty structure is neutral
  auto t = tp(Logic::FO, 2, path(3));
  EXPECT_EQ(compose(empty_type(type_node(t).ctx, 2), t), t);
  EXPECT_EQ(compose(t, empty_type(type_node(t).ctx, 2)), t);
}

TEST(Types, ComposeAlgebra) {
  Signature r({{"R", 1}});
  Structure red(r, 1), plain(r, 1);
  red.add(0, {0});
  for (Logic L : {Logic::FO, Logic::MSO}) {
    auto a = tp(L, 2, with_order(red, {0})), b = tp(L, 2, with_order(plain, {0}));
    // ordered sum is not commutative: is the first element red?
    EXPECT_NE(compose(a, b), compose(b, a));
    EXPECT_EQ(compose(compose(a, b), a), compose(a, compose(b, a)));
    auto ua = tp(L, 2, red), ub = tp(L, 2, plain);
    EXPECT_EQ(compose(ua, ub), compose(ub, ua));
    EXPECT_EQ(compose(compose(ua, ub), ub), compose(ua, compose(ub, ub)));
  }
}

TEST(Types, AddRootMatchesRootRemoval) {
  // Lemma 1 / Lemma 24: the type of A is determined by alpha(r) and tp(A^[r])
  Signature s({{"E", 2}, {"R", 1}});
  EnumOptions opt;
  opt.min_size = 2;
  opt.max_size = 3;
  for (auto& A : enum_structures(s, opt))
    for (int r = 0; r < A.n; ++r) {
      auto B = remove_and_expand(A, r);
      for (Logic L : {Logic::FO, Logic::MSO}) {
        int q = 2;
        EXPECT_EQ(add_root_type(s, atomic_type(A, r), tp(L, q, B.s)), tp(L, q, A));
        // ordered, r first
        std::vector<int> ord{r};
        for (int b : B.to_parent) ord.push_back(b);
        auto Ao = with_order(A, ord);
        std::vector<int> bord;
        for (int i = 0; i < B.s.n; ++i) bord.push_back(i);
        EXPECT_EQ(add_root_type(s, atomic_type(A, r), tp(L, q, with_order(B.s, bord))), tp(L, q, Ao));
      }
    }
}

TEST(Types, RecursiveAndComponentwise) {
  EnumOptions opt;
  opt.max_size = 5;
  opt.graph_mode = true;
  std::mt19937 rng(11);
  for (auto& A : enum_structures(graph_sig(), opt)) {
    EXPECT_EQ(tp_recursive(Logic::FO, 2, A), tp(Logic::FO, 2, A)) << to_text(A);
    EXPECT_EQ(tp_by_components(Logic::FO, 2, A), tp(Logic::FO, 2, A));
    if (A.n <= 4) EXPECT_EQ(tp_recursive(Logic::MSO, 2, A), tp(Logic::MSO, 2, A)) << to_text(A);
  }
  // component ordered
  auto A = with_order(disjoint_union(path(2), path(3)), {1, 0, 3, 2, 4});
  EXPECT_EQ(tp_by_components(Logic::MSO, 2, A), tp(Logic::MSO, 2, A));
  EXPECT_THROW(tp_by_components(Logic::FO, 2, with_order(disjoint_union(path(2), path(2)), {0, 2, 1, 3})),
               DomainError);
}

TEST(Types, EvalOnTypeMatchesEval) {
  std::vector<std::string> fs = {
      "exists x. forall y. E(x,y) | x = y",
      "forall x. exists y. E(x,y)",
      "exists x. exists y. !(x = y) & !E(x,y)",
      "existsSet X. exists x. X(x) & (forall y. E(x,y) -> !X(y))",
      "forallSet X. (exists x. X(x)) -> exists x. X(x) & R(x)",
  };
  std::vector<std::string> ofs = {"exists x. forall y. x <= y & R(x)", "exists x. exists y. x <= y & E(y,x) & !(x = y)"};
  Signature s({{"E", 2}, {"R", 1}});
  std::mt19937 rng(5);
  for (int it = 0; it < 40; ++it) {
    auto A = random_structure(rng, s, rng() % 4);
    for (auto& t : fs) {
      auto f = parse_formula(t);
      Logic L = logic_of(f) == Logic::MSO ? Logic::MSO : Logic::FO;
      int q = quantifier_rank(f);
      EXPECT_EQ(eval_on_type(f, tp(L, q, A)), eval(A, f)) << t;
      EXPECT_EQ(eval_on_type(f, tp(Logic::MSO, q + 1, A)), eval(A, f)) << t;
    }
    auto Ao = random_order(rng, A);
    for (auto& t : ofs) {
      auto f = parse_formula(t);
      EXPECT_EQ(eval_on_type(f, tp(Logic::FO, 2, Ao)), eval(Ao, f)) << t;
    }
  }
  EXPECT_THROW(eval_on_type(parse_formula("exists x. exists y. E(x,y)"), tp(Logic::FO, 1, path(2))), DomainError);
  EXPECT_THROW(eval_on_type(parse_formula("existsMod[0,2] x. R(x)"), tp(Logic::FO, 1, path(2))), DomainError);
}

TEST(Types, Truncate) {
  auto A = path(4);
  EXPECT_EQ(truncate_type(tp(Logic::FO, 3, A), 2), tp(Logic::FO, 2, A));
  EXPECT_EQ(truncate_type(tp(Logic::MSO, 2, A), 1), tp(Logic::MSO, 1, A));
}

TEST(Types, HashIsStructural) {
  auto a = type_hash(tp(Logic::FO, 2, path(3)));
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a, type_hash(tp(Logic::FO, 2, relabel(path(3), {1, 2, 0}))));
  EXPECT_NE(a, type_hash(tp(Logic::FO, 2, clique(3))));
}

TEST(ShrinkModel, Examples) {
  Structure iso(graph_sig(), 10);
  auto B = shrink_model(iso, Logic::FO, 2);
  EXPECT_LE(B.s.n, 5);
  EXPECT_EQ(tp(Logic::FO, 2, B.s), tp(Logic::FO, 2, iso));
  auto one = shrink_model(Structure(graph_sig(), 1), Logic::FO, 2);
  EXPECT_EQ(one.s.n, 1);
  auto S = star(6);
  auto C = shrink_model(S, Logic::FO, 2);
  EXPECT_LE(C.s.n, S.n);
  EXPECT_EQ(tp(Logic::FO, 2, C.s), tp(Logic::FO, 2, S));
  auto M = shrink_model(star(6), Logic::MSO, 2);
  EXPECT_EQ(tp(Logic::MSO, 2, M.s), tp(Logic::MSO, 2, star(6)));
}
