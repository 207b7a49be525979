#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tdl/automata.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/eval.hpp"
#include "tdl/qorder.hpp"
#include "tdl/translate.hpp"

using namespace tdl;
using namespace tdl::testing;

namespace {

Signature er_sig() { return Signature({{"E", 2}, {"R", 1}}); }

std::vector<Structure> td_structures(const Signature& s, int d, int n, bool gm) {
  EnumOptions eo;
  eo.max_size = n;
  eo.td = d;
  eo.graph_mode = gm;
  return enum_structures(s, eo);
}

const char* kEven =
    "existsSet X. ((forall x. ((forall y. x <= y) -> X(x))) & (forall x. ((forall y. y <= x) -> !X(x))) & "
    "forall x. forall y. ((x <= y & !(x = y) & forall z. (z <= x | y <= z)) -> ((X(x) -> !X(y)) & (!X(x) -> X(y)))))";

}  // namespace

TEST(Counting, CountComponents) {
  auto phi = parse_formula("exists x. R(x)");
  Structure A(er_sig(), 3);
  A.add("E", {0, 1});
  A.add("E", {1, 0});
  A.add("R", {1});
  EXPECT_EQ(count_components(A, {phi}), CountVec{1});
  EXPECT_EQ(count_components(Structure(er_sig(), 0), {phi, f_true()}), (CountVec{0, 0}));
  EXPECT_EQ(count_components(A, {f_true()}), CountVec{2});
  EXPECT_EQ(cap_vec({0, 3, 7}, 2), (CountVec{0, 2, 2}));
  EXPECT_EQ(mod_vec({0, 3, 7}, 2), (CountVec{0, 1, 1}));
}

TEST(Counting, CountFormulaExactlyOne) {
  Fresh fr;
  auto phi = parse_formula("exists x. R(x)");
  auto psi = count_formula(er_sig(), {phi}, {{1}}, 2, 2, fr);
  auto none = count_formula(er_sig(), {phi}, {}, 2, 2, fr);
  auto all = count_formula(er_sig(), {phi}, {{0}, {1}, {2}}, 2, 2, fr);
  EXPECT_EQ(render(none), "false");
  EXPECT_LE(alternation_depth(psi), alternation_depth(phi) + 2);
  Evaluator e(psi), ea(all);
  int seen = 0;
  for (auto& A : td_structures(er_sig(), 2, 5, true)) {
    int n = count_components(A, {phi})[0];
    EXPECT_EQ(e.eval(A), n == 1) << to_text(A);
    EXPECT_TRUE(ea.eval(A));
    ++seen;
  }
  EXPECT_GT(seen, 100);
  EXPECT_THROW(count_formula(er_sig(), {phi}, {{3}}, 2, 2, fr), InputError);
}

TEST(Counting, ModCountParity) {
  Fresh fr;
  auto some = parse_formula("exists x. x = x");
  std::set<ModVec> R{{{0}, {0}}, {{2}, {0}}};
  int b = measured_root_bound(graph_sig(), 2, 8, true);
  EXPECT_EQ(b, 2);
  auto chi = mod_count_formula(graph_sig(), {some}, R, 2, 2, b, fr);
  EXPECT_LE(alternation_depth(chi), std::max(alternation_depth(some) + 2, 2 * (2 - 1) + 2));
  Evaluator e(chi);
  for (auto& A : td_structures(graph_sig(), 2, 6, true))
    EXPECT_EQ(e.eval(A), components(A).size() % 2 == 0) << to_text(A);
  EXPECT_EQ(render(mod_count_formula(graph_sig(), {some}, {}, 2, 2, b, fr)), "false");
}

TEST(Counting, ComputeR) {
  Signature e(std::vector<Symbol>{});
  Structure one(e, 1);
  one.order = std::vector<int>{0};
  std::vector<TypeId> conn{tp(Logic::FO, 2, one)};
  EXPECT_EQ(compute_R([](TypeId) { return true; }, conn, 3).size(), 4u);
  EXPECT_TRUE(compute_R([](TypeId) { return false; }, conn, 3).empty());
  auto two = parse_formula("exists x. exists y. !(x = y)");
  EXPECT_EQ(compute_R([&](TypeId t) { return eval_on_type(two, t); }, conn, 3), (std::set<CountVec>{{2}, {3}}));
  EXPECT_EQ(type_of_counts(conn, {2}), compose(conn[0], conn[0]));
}

TEST(Counting, Thresholds) {
  Level lv;
  EXPECT_EQ(threshold(ThresholdMode::Paper, Pipeline::OIFO, 1, lv), 3);
  EXPECT_EQ(threshold(ThresholdMode::Paper, Pipeline::OIFO, 2, lv), 5);
  lv.thresholds = {1, 3, 2};
  EXPECT_EQ(threshold(ThresholdMode::Empirical, Pipeline::OIFO, 2, lv), 3);
}

TEST(Translate, ConnectedDefinersPartition) {
  TranslateOptions o;
  o.d = 2;
  o.max_size = 5;
  o.graph_mode = true;
  auto r = translate_oifo(parse_formula("exists x. forall y. x <= y"), graph_sig(), o);
  const Level& top = r.levels[0];
  ASSERT_EQ(top.definers.size(), top.conn.size());
  std::vector<Evaluator> ev;
  for (auto& f : top.definers) ev.emplace_back(f);
  for (auto& A : top.universe) {
    TypeId t = tp_ordered(Logic::FO, 2, A);
    for (size_t i = 0; i < top.conn.size(); ++i) EXPECT_EQ(ev[i].eval(A), top.conn[i] == t) << to_text(A);
  }
  // the level below only holds one type: a vertex adjacent to the removed root
  EXPECT_EQ(r.levels[1].conn.size(), 1u);
  EXPECT_LE(top.conn.size(), (size_t{1} << r.levels[1].sig.size()) * r.levels[1].full.size());
}

TEST(Translate, OrderInvariantFO) {
  TranslateOptions o;
  o.d = 2;
  o.max_size = 5;
  o.graph_mode = true;
  for (const char* src : {"exists x. forall y. x <= y", "exists x. exists y. E(x,y)", "forall x. exists y. E(x,y)"}) {
    auto phi = parse_formula(src);
    auto r = translate_oifo(phi, graph_sig(), o);
    EXPECT_LE(r.m.qad, 3 * o.d) << src;
    auto v = verify_equivalence(phi, r.psi, graph_sig(), 2, 5, true, true);
    EXPECT_TRUE(v.ok) << src;
    EXPECT_EQ(v.checked, 19u);
  }
  // nonemptiness
  auto r = translate_oifo(parse_formula("exists x. forall y. x <= y"), graph_sig(), o);
  auto v = verify_equivalence(parse_formula("exists x. x = x"), r.psi, graph_sig(), 2, 5, false, true);
  EXPECT_TRUE(v.ok);
}

TEST(Translate, MSOToFO) {
  TranslateOptions o;
  o.d = 2;
  o.max_size = 4;
  o.graph_mode = true;
  auto taut = parse_formula("existsSet X. forall x. X(x)");
  auto r = translate_mso(taut, graph_sig(), o);
  EXPECT_TRUE(verify_equivalence(f_true(), r.psi, graph_sig(), 2, 5, false, true).ok);
  EXPECT_THROW(translate_mso(parse_formula("exists x. x <= x"), graph_sig(), o), InputError);
}

TEST(Translate, OrderInvariantMSOParity) {
  Signature p({{"P", 1}});
  auto phi = parse_formula(kEven);
  TranslateOptions o;
  o.d = 1;
  o.max_size = 1;
  auto r = translate_oimso(phi, p, o);
  EXPECT_EQ(r.p % 2, 0);
  EXPECT_EQ(r.period_source, "automaton");
  EXPECT_LE(r.m.qad, 3);
  Evaluator e(r.psi);
  for (auto& A : td_structures(p, 1, 8, false)) EXPECT_EQ(e.eval(A), A.n % 2 == 0) << A.n;
  // <=-free input
  auto ex = parse_formula("exists x. P(x)");
  auto r2 = translate_oimso(ex, p, o);
  EXPECT_TRUE(verify_equivalence(ex, r2.psi, p, 1, 6, false).ok);
}

TEST(Translate, VerifyReports) {
  auto v = verify_equivalence(f_true(), f_false(), graph_sig(), 2, 3, false, true);
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.mismatch_index, 0u);
  ASSERT_TRUE(v.mismatch.has_value());
  EXPECT_EQ(v.mismatch->n, 0);
  auto w = verify_equivalence(f_true(), f_false(), graph_sig(), 2, -1, false, true);
  EXPECT_TRUE(w.ok);
  EXPECT_EQ(w.checked, 0u);
}

TEST(Automata, EvenLength) {
  Signature p({{"P", 1}});
  Dfa a = compile_word_sentence(parse_formula(kEven), p);
  for (int n = 0; n <= 9; ++n)
    for (uint32_t mask = 0; mask < (1u << n); mask += 1 + (mask % 3)) {
      std::vector<uint32_t> w;
      for (int i = 0; i < n; ++i) w.push_back(mask >> i & 1);
      EXPECT_EQ(a.run(w), n % 2 == 0);
    }
  EXPECT_EQ(dfa_letter_period(a, {0, 1}), 2);
}

TEST(Automata, AgreesWithEvaluator) {
  Signature p({{"P", 1}, {"Q", 1}});
  std::vector<std::string> srcs = {
      "forall x. (P(x) -> exists y. (x <= y & Q(y)))",
      "exists x. exists y. (!(x = y) & P(x) & P(y))",
      "existsSet X. (forall x. (X(x) -> P(x)) & exists y. (X(y) & Q(y)))",
      "forallSet X. ((exists x. X(x)) -> exists x. (X(x) & forall y. (X(y) -> x <= y)))",
      "exists x. (forall y. (y <= x) & !P(x))",
  };
  auto words = td_structures(p, 1, 5, false);
  for (auto& s : srcs) {
    auto f = parse_formula(s);
    Dfa a = compile_word_sentence(f, p);
    Evaluator e(f);
    for (auto& A : words)
      enum_orders(A, [&](const Structure& O) {
        EXPECT_EQ(a.run(structure_word(O)), e.eval(O)) << s << "\n" << to_text(O);
        return true;
      });
  }
}

TEST(Translate, OrderInvariantMSOTypesRoute) {
  TranslateOptions o;
  o.d = 2;
  o.max_size = 4;
  o.graph_mode = true;
  o.period = PeriodSource::Types;
  auto phi = parse_formula("exists x. forall y. (x <= y -> !E(x,y))");
  auto r = translate_oimso(phi, graph_sig(), o);
  EXPECT_EQ(r.period_source, "types");
  EXPECT_LE(r.m.qad, 3 * o.d);
  auto v = verify_equivalence(phi, r.psi, graph_sig(), 2, 5, true, true);
  EXPECT_TRUE(v.ok);
}
