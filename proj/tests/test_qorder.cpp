#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/qorder.hpp"
#include "tdl/treedepth.hpp"

using namespace tdl;
using namespace tdl::testing;

namespace {

Signature er_sig() { return Signature({{"E", 2}, {"R", 1}}); }

}  // namespace

TEST(QOrder, EdgeWithColouredEnd) {
  Structure A(er_sig(), 2);
  A.add("E", {0, 1});
  A.add("E", {1, 0});
  A.add("R", {0});  // a = 0 carries R, b = 1 does not
  for (Logic L : {Logic::FO, Logic::MSO}) {
    auto qo = q_order_full(L, 2, A);
    EXPECT_EQ(qo.order, (std::vector<int>{1, 0}));
    EXPECT_EQ(qo.root, 1);
    EXPECT_TRUE(qo.alpha.empty());
    EXPECT_TRUE(is_q_order(L, 2, with_order(A, {1, 0})));
    EXPECT_FALSE(is_q_order(L, 2, with_order(A, {0, 1})));
  }
}

TEST(QOrder, SingletonsAndIsolatedPair) {
  Structure one(er_sig(), 1);
  EXPECT_EQ(q_order(Logic::FO, 1, one).order, (std::vector<int>{0}));
  EXPECT_TRUE(is_q_order(Logic::FO, 1, with_order(one, {0})));
  Structure two(er_sig(), 2);
  two.add("R", {0});
  auto qo = q_order_full(Logic::FO, 1, two);
  // singleton types: {} before {R} under the structural order
  auto t0 = tp(Logic::FO, 1, with_order(induced(two, {0}).s, {0}));
  auto t1 = tp(Logic::FO, 1, with_order(induced(two, {1}).s, {0}));
  std::vector<int> expect = type_compare(t1, t0) < 0 ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
  EXPECT_EQ(qo.order, expect);
  EXPECT_EQ(qo.order, q_order_full(Logic::FO, 1, two).order);
  EXPECT_THROW(rtp(Logic::FO, 1, two), DomainError);
  EXPECT_THROW(rtp(Logic::FO, 1, one), DomainError);
  EXPECT_THROW(is_q_order(Logic::FO, 1, two), InputError);
}

TEST(QOrder, ConstructedTypeMatchesUnravelling) {
  EnumOptions eo;
  eo.max_size = 5;
  eo.graph_mode = true;
  for (auto& A : enum_structures(graph_sig(), eo)) {
    for (int q : {1, 2}) {
      auto qo = q_order_full(Logic::FO, q, A);
      Structure O = with_order(A, qo.order);
      EXPECT_EQ(qo.type, tp(Logic::FO, q, O));
      EXPECT_TRUE(is_q_order(Logic::FO, q, O)) << to_text(A);
    }
  }
}

TEST(QOrder, IsomorphicCopiesGetOneType) {
  Structure P = path(4);
  Structure Q = relabel(P, {2, 0, 3, 1});
  for (Logic L : {Logic::FO, Logic::MSO}) {
    EXPECT_EQ(tp_ordered(L, 2, P), tp_ordered(L, 2, Q));
    EXPECT_EQ(rtp(L, 2, P), rtp(L, 2, Q));
  }
}

// every q-order of a small structure gives the same tp and rtp
TEST(QOrder, AllQOrdersAgree) {
  std::vector<std::pair<Signature, bool>> cfgs = {{graph_sig(), true}, {er_sig(), true}, {Signature({{"E", 2}}), false}};
  for (auto& [sig, gm] : cfgs) {
    EnumOptions eo;
    eo.max_size = gm && sig.size() == 1 ? 4 : 3;
    eo.graph_mode = gm;
    for (auto& A : enum_structures(sig, eo)) {
      for (Logic L : {Logic::FO, Logic::MSO})
        for (int q = 0; q <= 2; ++q) {
          TypeId ref = tp_ordered(L, q, A);
          bool conn = A.n > 1 && is_connected(A);
          TypeId rref = conn ? rtp(L, q, A) : -1;
          int accepted = 0;
          enum_orders(A, [&](const Structure& O) {
            if (!is_q_order(L, q, O)) return true;
            ++accepted;
            EXPECT_EQ(tp(L, q, O), ref) << to_text(O);
            if (conn) {
              auto B = remove_and_expand(O, O.order->front());
              EXPECT_EQ(tp(L, q, B.s), rref) << to_text(O);
              EXPECT_EQ(atomic_type(O, O.order->front()), q_order_full(L, q, A).alpha);
            }
            return true;
          });
          EXPECT_GE(accepted, 1);
        }
    }
  }
}

// equal (alpha, rtp) pairs give equal ordered types
TEST(QOrder, RootPairDeterminesType) {
  EnumOptions eo;
  eo.max_size = 5;
  eo.graph_mode = true;
  eo.connected = true;
  eo.min_size = 2;
  std::map<std::pair<std::string, TypeId>, TypeId> seen;
  for (auto& A : enum_structures(er_sig(), eo)) {
    if (A.n > 4) break;
    auto qo = q_order_full(Logic::FO, 2, A);
    auto key = std::make_pair(atomic_type_str(qo.alpha), qo.rtp);
    auto [it, fresh] = seen.emplace(key, qo.type);
    if (!fresh) EXPECT_EQ(it->second, qo.type);
  }
  EXPECT_GT(seen.size(), 5u);
}

TEST(QOrder, RealizedTypes) {
  Signature e(std::vector<Symbol>{});
  TableOptions o;
  o.max_size = 2;
  auto T = realized_types(e, Logic::FO, 1, 1, false, o);
  EXPECT_EQ(T.conn.size(), 1u);
  EXPECT_EQ(T.all.size(), 2u);  // empty vs nonempty
  EXPECT_TRUE(T.closed_under_union);
  Signature r({{"R", 1}});
  auto U = realized_types(r, Logic::FO, 1, 1, true, o);
  EXPECT_EQ(U.conn.size(), 2u);  // one per atomic type
  for (auto& c : U.conn) EXPECT_EQ(c.rep.n, 1);
  o.max_size = 4;
  o.graph_mode = true;
  for (int q : {1, 2}) {
    auto G = realized_types(graph_sig(), Logic::FO, q, 2, true, o);
    auto H = realized_types(graph_sig().expand(), Logic::FO, q, 1, true, o);
    EXPECT_LE(G.conn.size(), (size_t{1} << graph_sig().expand().size()) * H.all.size());
  }
}
