// Acceptance checks 1..10. One PASS/FAIL line per criterion.
//   acceptance            all of them
//   acceptance 2 7        a selection

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "tdl/automata.hpp"
#include "tdl/cm2fo.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/eval.hpp"
#include "tdl/fodecomp.hpp"
#include "tdl/lowerbound.hpp"
#include "tdl/qorder.hpp"
#include "tdl/translate.hpp"
#include "tdl/treedepth.hpp"
#include "tdl/types.hpp"

#ifndef TDL_DATA_DIR
#define TDL_DATA_DIR "data"
#endif

using namespace tdl;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream info;
  std::vector<std::string> fails;
  void require(bool c, const std::string& what) {
    if (!c) {
      pass = false;
      if (fails.size() < 5) fails.push_back(what);
    }
  }
};

Signature gsig() { return Signature({{"E", 2}}); }

std::vector<Structure> td_structs(const Signature& s, int d, int n, bool gm, bool connected = false, int lo = 0) {
  EnumOptions eo;
  eo.min_size = lo;
  eo.max_size = n;
  eo.td = d;
  eo.graph_mode = gm;
  eo.connected = connected;
  return enum_structures(s, eo);
}

Structure copies(const Structure& K, int t) {
  Structure R(K.sig, 0);
  for (int i = 0; i < t; ++i) R = disjoint_union(R, K);
  return R;
}

Structure sum_copies(const Structure& K, int t) {
  Structure R = with_order(Structure(K.sig, 0), {});
  for (int i = 0; i < t; ++i) R = ordered_sum(R, K);
  return R;
}

// ---- 1: ordered FO types of connected components stop changing at 2^q + 1 copies
void c1(Outcome& o) {
  TableOptions to;
  to.max_size = 4;
  to.graph_mode = true;
  for (int q : {1, 2}) {
    auto T = realized_types(gsig(), Logic::FO, q, 2, true, to);
    int t = (1 << q) + 1;
    for (auto& e : T.conn) {
      Structure Kt = copies(e.rep, t);
      bool same = tp_ordered(Logic::FO, q, Kt) == tp_ordered(Logic::FO, q, disjoint_union(Kt, e.rep));
      o.require(same, "q=" + std::to_string(q) + " type " + type_hash(e.type));
      o.require(e.threshold <= t, "threshold above 2^q+1");
    }
    o.info << "q=" << q << ": " << T.conn.size() << " connected types, t=" << t << "; ";
  }
}

// ---- 2: MSO -> FO, isolated vertex
void c2(Outcome& o) {
  auto phi = parse_formula("existsSet X. ((exists x. X(x)) & forall x. (X(x) -> forall y. !E(x,y)))");
  o.require(logic_of(phi) == Logic::MSO, "input is not MSO");
  TranslateOptions to;
  to.d = 2;
  to.max_size = 5;
  to.graph_mode = true;
  auto r = translate_mso(phi, gsig(), to);
  auto v = verify_equivalence(phi, r.psi, gsig(), 2, 5, false, true);
  auto iso = verify_equivalence(parse_formula("exists x. forall y. !E(x,y)"), r.psi, gsig(), 2, 5, false, true);
  o.require(logic_of(r.psi) == Logic::FO, "output not FO");
  o.require(v.ok && iso.ok, "psi disagrees");
  o.require(r.m.qad <= 6, "qad > 6");
  o.info << "checked " << v.checked << " structures, qr(psi)=" << r.m.qr << " qad(psi)=" << r.m.qad
         << " size=" << r.m.size;
}

// ---- 3: order-invariant FO -> FO
void c3(Outcome& o) {
  TranslateOptions to;
  to.d = 2;
  to.max_size = 5;
  to.graph_mode = true;
  struct Case {
    const char* phi;
    const char* meaning;
  };
  for (Case c : {Case{"exists x. forall y. x <= y", "exists x. x = x"},
                 Case{"forall x. exists y. E(x,y)", "forall x. exists y. E(x,y)"}}) {
    auto phi = parse_formula(c.phi);
    auto r = translate_oifo(phi, gsig(), to);
    auto v = verify_equivalence(phi, r.psi, gsig(), 2, 5, true, true);
    auto w = verify_equivalence(parse_formula(c.meaning), r.psi, gsig(), 2, 5, false, true);
    o.require(v.ok && w.ok, std::string("psi disagrees for ") + c.phi);
    o.require(!uses_order(r.psi), "psi uses <=");
    o.require(r.m.qad <= 6, "qad > 6");
    o.info << "[" << c.phi << "] checked " << v.checked << " qad=" << r.m.qad << " t=" << r.t << "; ";
  }
}

// ---- 4: even cardinality, MSO[<=] -> FO+MOD
const char* kEven =
    "existsSet X. ((forall x. ((forall y. x <= y) -> X(x))) & (forall x. ((forall y. y <= x) -> !X(x))) & "
    "forall x. forall y. ((x <= y & !(x = y) & forall z. (z <= x | y <= z)) -> ((X(x) -> !X(y)) & (!X(x) -> X(y)))))";

void c4(Outcome& o) {
  Signature p({{"P", 1}});
  auto phi = parse_formula(kEven);
  int inv = 0;
  for (auto& A : td_structs(p, -1, 6, false)) {
    o.require(check_order_invariance(A, phi).invariant, "phi_even not order-invariant");
    ++inv;
  }
  TranslateOptions to;
  to.d = 1;
  to.max_size = 1;
  auto r = translate_oimso(phi, p, to);
  Evaluator e(r.psi);
  int checked = 0;
  for (auto& A : td_structs(p, -1, 8, false)) {
    o.require(e.eval(A) == (A.n % 2 == 0), "parity wrong at n=" + std::to_string(A.n));
    ++checked;
  }
  o.require(r.p >= 1 && r.p % 2 == 0, "p not a multiple of 2");
  o.require(logic_of(r.psi) == Logic::FOMOD || logic_of(r.psi) == Logic::FO, "output not FO+MOD");
  o.info << "invariance on " << inv << " structures, parity on " << checked << ", p=" << r.p << " ("
         << r.period_source << "), qad=" << r.m.qad;
}

// ---- 5: pumping
Structure component_ordered(std::mt19937& rng, const std::vector<Structure>& pool) {
  int k = 1 + rng() % 3;
  Structure A = with_order(Structure(gsig(), 0), {});
  for (int i = 0; i < k; ++i) {
    Structure C = pool[rng() % pool.size()];
    std::vector<int> ord(C.n);
    for (int j = 0; j < C.n; ++j) ord[j] = j;
    std::shuffle(ord.begin(), ord.end(), rng);
    A = ordered_sum(A, with_order(C, ord));
  }
  return A;
}

void c5(Outcome& o) {
  TableOptions to;
  to.max_size = 3;
  to.graph_mode = true;
  auto T = realized_types(gsig(), Logic::MSO, 2, 2, true, to);
  o.require(T.closed_under_union, "table not closed");
  int p = pumping_period(T.all);
  auto pool = td_structs(gsig(), 2, 3, true, true, 1);
  std::mt19937 rng(2024);
  int direct = 0;
  for (int s = 0; s < 20; ++s) {
    Structure A = component_ordered(rng, pool);
    Structure A1 = sum_copies(A, 1 + p), A2 = sum_copies(A, 1 + 2 * p);
    bool eq = tp_by_components(Logic::MSO, 2, A1) == tp_by_components(Logic::MSO, 2, A2);
    o.require(eq, "pumping fails on sample " + std::to_string(s));
    if (A2.n <= 8) {
      ++direct;
      o.require(tp(Logic::MSO, 2, A1) == tp(Logic::MSO, 2, A2), "direct unravelling disagrees");
    }
  }
  o.info << "p=" << p << " from " << T.all.size() << " types; 20 samples, " << direct << " also unravelled";
}

// ---- 6: shrinking
void c6(Outcome& o) {
  auto all = td_structs(gsig(), 2, 6, true);
  for (Logic L : {Logic::FO, Logic::MSO}) {
    int mx = 0, worst_in = 0;
    for (auto& A : all) {
      auto B = shrink_model(A, L, 2);
      o.require(B.s.n <= A.n, "shrunk model larger");
      o.require(tp(L, 2, B.s) == tp(L, 2, A), "type changed:\n" + to_text(A));
      o.require(induced(A, B.to_parent).s == B.s, "not an induced substructure");
      if (B.s.n > mx) {
        mx = B.s.n;
        worst_in = A.n;
      }
    }
    o.info << logic_name(L) << " q=2 d=2: max shrunk size " << mx << " (from " << worst_in << "); ";
  }
  o.info << all.size() << " structures";
}

// ---- 7: lower-bound suite
Structure forest(const std::vector<int>& par) {
  Structure F(lower_sig(), static_cast<int>(par.size()));
  for (size_t v = 0; v < par.size(); ++v) {
    if (par[v] >= 0) F.add(0, {par[v], static_cast<int>(v)});
    F.add(1, {static_cast<int>(v)});
  }
  return F;
}

void c7(Outcome& o) {
  std::vector<std::unique_ptr<Evaluator>> eq;
  for (int d = 1; d <= 3; ++d) {
    Fresh fr;
    eq.push_back(std::make_unique<Evaluator>(build_eq(d, "x", "y", fr)));
  }
  // forests whose trees are all number encodings: height <= 3, <= 8 nodes
  std::set<std::string> seen;
  int enc_forests = 0;
  for (int n = 1; n <= 8; ++n) {
    std::vector<int> par(n, -1);
    std::function<void(int)> rec = [&](int v) {
      if (v == n) {
        Structure F = forest(par);
        if (forest_height(F) > 3) return;
        auto roots = forest_roots(F);
        for (int r : roots) {
          Structure S = subtree(F, r);
          if (!(canonical_form(num(S)) == canonical_form(S))) return;
        }
        if (!seen.insert(canonical_form(F)).second) return;
        ++enc_forests;
        int h = forest_height(F);
        for (int a : roots)
          for (int b : roots) {
            bool want = decode(subtree(F, a)) == decode(subtree(F, b));
            for (int d = std::max(1, h); d <= 3; ++d)
              o.require(eq[d - 1]->eval(F, Env{{{"x", a}, {"y", b}}, {}}) == want, "eq_d vs decode:\n" + to_text(F));
          }
        return;
      }
      for (int p = -1; p < v; ++p) {
        par[v] = p;
        rec(v + 1);
      }
    };
    rec(1);
  }
  // random general forests, any shape, oracle num
  std::mt19937 rng(7);
  int random_forests = 0;
  while (random_forests < 200) {
    int n = 2 + rng() % 9;
    std::vector<int> par(n, -1);
    for (int v = 1; v < n; ++v) par[v] = static_cast<int>(rng() % (v + 1)) - 1;
    Structure F = forest(par);
    int h = forest_height(F);
    if (h > 3) continue;
    ++random_forests;
    auto roots = forest_roots(F);
    for (int a : roots)
      for (int b : roots) {
        bool want = canonical_form(num(subtree(F, a))) == canonical_form(num(subtree(F, b)));
        for (int d = h; d <= 3; ++d)
          o.require(eq[d - 1]->eval(F, Env{{{"x", a}, {"y", b}}, {}}) == want, "eq_d vs num:\n" + to_text(F));
      }
  }
  // phi_d counts witness trees
  for (int d = 1; d <= 2; ++d) {
    Formula phi = build_phi_lower(d);
    for (int n = 0; n <= 4; ++n)
      o.require(eval(build_family(d, n), phi) == (static_cast<uint64_t>(n) >= tower(d)),
                "F_" + std::to_string(d) + "^" + std::to_string(n));
  }
  // FO does not see the difference
  for (int q = 0; q <= 2; ++q)
    for (int k = q; k <= 4; ++k)
      o.require(tp(Logic::FO, q, build_family(2, k)) == tp(Logic::FO, q, build_family(2, k + 1)),
                "FO separates F_2^" + std::to_string(k));
  // size of eq_d
  std::vector<uint64_t> sz;
  for (int d = 1; d <= 5; ++d) {
    Fresh fr;
    sz.push_back(formula_size(build_eq(d, "x", "y", fr)));
  }
  std::vector<int64_t> slope;
  for (size_t i = 1; i < sz.size(); ++i) slope.push_back(static_cast<int64_t>(sz[i] - sz[i - 1]));
  for (size_t i = 1; i < slope.size(); ++i) o.require(slope[i] >= slope[i - 1] && slope[i] > 0, "slope not monotone");
  // linear: the slope settles (constant from d = 2 on)
  for (size_t i = 2; i < slope.size(); ++i) o.require(slope[i] == slope[1], "size not linear in d");
  o.info << enc_forests << " encoding forests, " << random_forests << " random forests; |eq_d| d=1..5:";
  for (auto s : sz) o.info << " " << s;
}

// ---- 8: canonical tree decompositions
void c8(Outcome& o) {
  EnumOptions eo;
  eo.min_size = 1;
  eo.max_size = 7;
  eo.td = 3;
  eo.graph_mode = true;
  int checked = 0;
  enum_structures(gsig(), eo, [&](const Structure& A) {
    int d = std::max(1, tree_depth(A));
    for (int dd = d; dd <= 3; dd += (3 - d > 0 ? 3 - d : 1)) {
      Decomposition D;
      try {
        D = decompose(A, dd);
      } catch (const std::logic_error& e) {
        o.require(false, std::string("paths disagree: ") + e.what());
        continue;
      }
      o.require(D.formula_path, "formula path did not run");
      auto rep = verify_decomposition(A, D.td, dd);
      o.require(rep.ok, to_text(A) + (rep.failures.empty() ? "" : rep.failures[0]));
      if (dd == 3) break;
    }
    ++checked;
    return true;
  });
  o.info << checked << " graphs, both paths at td and at 3";
}

// ---- 9: counter machines
void c9(Outcome& o) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (auto& e : fs::directory_iterator(fs::path(TDL_DATA_DIR) / "cm"))
    if (e.path().extension() == ".cm") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  int halting = 0, looping = 0;
  for (auto& f : files) {
    Program P = load_program(f.string());
    int l = P.length();
    Formula phi = build_sentence(P);
    Signature sp = cm_sig(l).with({"P", 1});
    Formula wrap = invariance_reduction(phi, cm_sig(l));
    auto r = run_machine(P, 100000);
    std::string name = f.filename().string();
    FindModelOptions fo;
    fo.ordered = true;
    fo.graph_mode = true;
    if (r.halted) {
      ++halting;
      Structure M = build_matching_extension(word_structure(encode_run(r.trace), l), P);
      o.require(eval(M, phi), name + ": run model fails phi");
      o.require(tree_depth(M) <= 2, name + ": td > 2");
      // below the model size nothing, at it the run
      fo.max_size = M.n - 1;
      o.require(!find_model(phi, cm_sig(l), fo), name + ": model below run size");
      fo.max_size = M.n;
      auto found = find_model(phi, cm_sig(l), fo);
      o.require(found && decode_word(*found, l) == r.trace, name + ": bounded search misses the run");
      // wrapper: non-invariant once a model fits
      Structure MP = without_order(M);
      MP.sig = sp;
      MP.rel.resize(sp.size());
      MP.add("P", {0});
      if (MP.n <= 10) o.require(!check_order_invariance(MP, wrap).invariant, name + ": wrapper invariant on model");
      fo.max_size = std::min(M.n - 1, 8);
      o.require(!find_model(wrap, sp, fo), name + ": wrapper satisfiable below run size");
      o.info << name << " halts, model " << M.n << "; ";
    } else {
      ++looping;
      fo.max_size = 12;
      o.require(!find_model(phi, cm_sig(l), fo), name + ": model up to 12");
      // no ordered model of the wrapper: false under every order, hence invariant.
      // The free P doubles the search per element, so the wrapper stops at 8.
      fo.max_size = 8;
      o.require(!find_model(wrap, sp, fo), name + ": wrapper satisfiable");
      o.info << name << " no model <= 12; ";
    }
  }
  o.require(halting >= 3 && looping >= 2, "corpus too small");
}

// ---- 10: property suites
void c10(Outcome& o) {
  Signature er({{"E", 2}, {"R", 1}});
  // root removal determines the type
  int pairs = 0;
  for (Logic L : {Logic::FO, Logic::MSO})
    for (int q = 0; q <= 2; ++q) {
      std::map<std::pair<std::string, TypeId>, TypeId> seen;
      for (auto& A : td_structs(gsig(), -1, 5, true, true, 2)) {
        if (tree_depth(A) <= 1) continue;
        for (int r : roots_of(A)) {
          auto key = std::make_pair(atomic_type_str(atomic_type(A, r)), tp(L, q, remove_and_expand(A, r).s));
          auto [it, fresh] = seen.emplace(key, tp(L, q, A));
          o.require(it->second == tp(L, q, A), "root removal: " + to_text(A));
          pairs += !fresh;
        }
      }
    }
  o.info << "root removal: " << pairs << " repeated keys; ";

  // composition, ordered and unordered
  std::mt19937 rng(3);
  auto small = td_structs(er, -1, 3, true);
  int quads = 0;
  for (Logic L : {Logic::FO, Logic::MSO})
    for (bool ordered : {false, true}) {
      std::map<TypeId, std::vector<Structure>> by;
      for (auto& A : small) {
        Structure X = A;
        if (ordered) {
          std::vector<int> ord(A.n);
          for (int i = 0; i < A.n; ++i) ord[i] = i;
          std::shuffle(ord.begin(), ord.end(), rng);
          X = with_order(A, ord);
        }
        by[tp(L, 2, X)].push_back(X);
      }
      std::vector<std::vector<Structure>*> classes;
      for (auto& [t, v] : by)
        if (v.size() >= 2) classes.push_back(&v);
      for (int s = 0; s < 40 && !classes.empty(); ++s) {
        auto& ca = *classes[rng() % classes.size()];
        auto& cb = *classes[rng() % classes.size()];
        auto& a1 = ca[rng() % ca.size()];
        auto& a2 = ca[rng() % ca.size()];
        auto& b1 = cb[rng() % cb.size()];
        auto& b2 = cb[rng() % cb.size()];
        auto u1 = ordered ? ordered_sum(a1, b1) : disjoint_union(a1, b1);
        auto u2 = ordered ? ordered_sum(a2, b2) : disjoint_union(a2, b2);
        o.require(tp(L, 2, u1) == tp(L, 2, u2), "composition");
        ++quads;
      }
    }
  o.info << "composition: " << quads << " quadruples; ";

  // every q-order gives one tp and one rtp
  int orders = 0;
  for (auto& A : td_structs(gsig(), -1, 4, true))
    for (Logic L : {Logic::FO, Logic::MSO})
      for (int q = 0; q <= 2; ++q) {
        TypeId ref = tp_ordered(L, q, A);
        bool conn = A.n > 1 && is_connected(A);
        TypeId rref = conn ? rtp(L, q, A) : -1;
        int acc = 0;
        enum_orders(A, [&](const Structure& O) {
          if (!is_q_order(L, q, O)) return true;
          ++acc;
          o.require(tp(L, q, O) == ref, "two q-orders, two types");
          if (conn) o.require(tp(L, q, remove_and_expand(O, O.order->front()).s) == rref, "two rtps");
          return true;
        });
        o.require(acc >= 1, "no q-order accepted");
        orders += acc;
      }
  o.info << "q-orders: " << orders << " accepted; ";

  // |T^conn(sigma,q,d)| <= 2^|expand(sigma)| * |T(expand(sigma),q,d-1)|
  TableOptions to;
  to.max_size = 4;
  to.graph_mode = true;
  for (Logic L : {Logic::FO, Logic::MSO})
    for (int q : {1, 2}) {
      auto G = realized_types(gsig(), L, q, 2, true, to);
      auto H = realized_types(gsig().expand(), L, q, 1, true, to);
      size_t bound = (size_t{1} << gsig().expand().size()) * H.all.size();
      o.require(G.conn.size() <= bound, "counting inequality");
      o.info << logic_name(L) << " q=" << q << ": " << G.conn.size() << "<=" << bound << " ";
    }

  // emitted formulas: qad bounds of the counting formulas
  for (int d = 1; d <= 3; ++d) {
    Fresh fr;
    std::vector<Formula> phis = {parse_formula("exists x. R(x)"), parse_formula("forall x. exists y. E(x,y)")};
    int a = 0;
    for (auto& f : phis) a = std::max(a, alternation_depth(f));
    std::set<CountVec> R{{1, 0}, {2, 1}, {0, 2}};
    std::set<ModVec> RM{{{1, 0}, {1, 0}}, {{2, 2}, {0, 0}}};
    auto c = count_formula(er, phis, R, 2, d, fr);
    auto m = mod_count_formula(er, phis, RM, 2, d, 2, fr);
    o.require(alternation_depth(c) <= a + 2, "count_formula qad");
    o.require(alternation_depth(m) <= std::max(a + 2, 2 * (d - 1) + 2), "mod_count_formula qad");
  }
  o.info << "counting qad bounds d=1..3";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<int, std::function<void(Outcome&)>>> all = {{1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5},
                                                                    {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (auto& [id, fn] : all) {
    if (!pick.empty() && !pick.count(id)) continue;
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL", s, o.info.str().c_str());
    for (auto& f : o.fails) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
