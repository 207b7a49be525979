#include "tdl/translate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tdl/automata.hpp"
#include "tdl/builders.hpp"
#include "tdl/enumerate.hpp"
#include "tdl/eval.hpp"
#include "tdl/qorder.hpp"
#include "tdl/treedepth.hpp"

namespace tdl {

CountVec count_components(const Structure& A, const std::vector<Formula>& phis) {
  CountVec out(phis.size(), 0);
  std::vector<Evaluator> ev;
  for (auto& f : phis) ev.emplace_back(f);
  for (auto& c : components(A))
    for (size_t i = 0; i < phis.size(); ++i)
      if (ev[i].eval(c.s)) ++out[i];
  return out;
}

CountVec cap_vec(const CountVec& v, int t) {
  CountVec o(v);
  for (auto& x : o) x = std::min(x, t);
  return o;
}

CountVec mod_vec(const CountVec& v, int p) {
  CountVec o(v);
  for (auto& x : o) x %= p;
  return o;
}

namespace {

// phi relativised to the component of x: phi~(x)
Formula localise(const Signature& sig, const Formula& phi, int d, const std::string& x, Fresh& fresh) {
  std::string z = fresh.var();
  return relativise(phi, build_reach(sig, d, x, z, fresh), z, fresh);
}

Formula rename1(const Formula& f, const std::string& from, const std::string& to, Fresh& fresh) {
  if (from == to) return f;
  return rename_free(f, {{from, to}}, fresh);
}

// Pieces of the counting sentence, shared across all vectors of R.
struct Counter {
  const Signature& sig;
  const std::vector<Formula>& phis;
  int t, d;
  Fresh& fresh;
  std::vector<Formula> local;  // phi~_i(x0)
  std::string x0;
  std::map<std::pair<int, int>, Formula> memo;

  Counter(const Signature& s, const std::vector<Formula>& p, int t_, int d_, Fresh& f)
      : sig(s), phis(p), t(t_), d(d_), fresh(f) {
    x0 = fresh.var();
    for (auto& phi : phis) local.push_back(localise(sig, phi, d, x0, fresh));
  }

  // exists xs psi_i^{n,t}(xs)
  Formula piece(int i, int n) {
    auto key = std::make_pair(i, n);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Formula out;
    if (n == 0) {
      std::string y = fresh.var();
      out = forall(y, neg(rename1(local[i], x0, y, fresh)));
    } else {
      std::vector<std::string> xs;
      for (int j = 0; j < n; ++j) xs.push_back(fresh.var());
      std::vector<Formula> parts;
      for (auto& x : xs) parts.push_back(rename1(local[i], x0, x, fresh));
      for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) parts.push_back(neg(build_reach(sig, d, xs[j], xs[k], fresh)));
      if (n < t) {
        std::string y = fresh.var();
        std::vector<Formula> near;
        for (auto& x : xs) near.push_back(build_reach(sig, d, y, x, fresh));
        parts.push_back(forall(y, implies(rename1(local[i], x0, y, fresh), disj(near))));
      }
      out = exists(xs, conj(parts));
    }
    memo.emplace(key, out);
    return out;
  }

  Formula exactly(const CountVec& v) {
    std::vector<Formula> parts;
    for (size_t i = 0; i < v.size(); ++i) parts.push_back(piece(static_cast<int>(i), v[i]));
    return conj(parts);
  }
};

}  // namespace

Formula count_formula(const Signature& sig, const std::vector<Formula>& phis, const std::set<CountVec>& R, int t,
                      int d, Fresh& fresh) {
  if (t < 1) throw InputError("count_formula: t must be positive");
  for (auto& v : R) {
    if (v.size() != phis.size()) throw InputError("count_formula: vector length differs from |Phi|");
    for (int x : v)
      if (x < 0 || x > t) throw InputError("count_formula: R entry out of [0,t]");
  }
  if (R.empty()) return f_false();
  Counter C(sig, phis, t, d, fresh);
  std::vector<Formula> alts;
  for (auto& v : R) alts.push_back(C.exactly(v));
  return disj(alts);
}

Formula mod_count_formula(const Signature& sig, const std::vector<Formula>& phis, const std::set<ModVec>& R, int p,
                          int d, int b, Fresh& fresh) {
  if (p < 1) throw InputError("mod_count_formula: p must be positive");
  if (b < 1) throw InputError("mod_count_formula: root bound must be positive");
  for (auto& [c, r] : R) {
    if (c.size() != phis.size() || r.size() != phis.size())
      throw InputError("mod_count_formula: vector length differs from |Phi|");
    for (size_t i = 0; i < c.size(); ++i)
      if (c[i] < 0 || c[i] > p || r[i] < 0 || r[i] >= p) throw InputError("mod_count_formula: R entry out of range");
  }
  if (R.empty()) return f_false();
  Counter C(sig, phis, p, d, fresh);
  std::string x = C.x0;
  // roots~(x): roots_d relativised to the component of x
  std::string rz = fresh.var();
  Formula roots_x = relativise(build_roots(sig, d, x, fresh), build_reach(sig, d, x, rz, fresh), rz, fresh);

  // phi_i^{=k}(x)
  std::map<std::pair<int, int>, Formula> eqk;
  auto phi_eq = [&](int i, int k) {
    auto key = std::make_pair(i, k);
    auto it = eqk.find(key);
    if (it != eqk.end()) return it->second;
    std::vector<std::string> xs;
    for (int j = 0; j < k; ++j) xs.push_back(fresh.var());
    std::vector<Formula> in;
    for (auto& xj : xs) {
      in.push_back(rename1(roots_x, x, xj, fresh));
      in.push_back(build_reach(sig, d, xj, x, fresh));
    }
    for (int j = 0; j < k; ++j)
      for (int l = j + 1; l < k; ++l) in.push_back(neq(xs[j], xs[l]));
    std::string y = fresh.var();
    std::vector<Formula> guard{rename1(roots_x, x, y, fresh)};
    for (auto& xj : xs) guard.push_back(neq(y, xj));
    in.push_back(forall(y, implies(conj(guard), neg(build_reach(sig, d, y, x, fresh)))));
    Formula f = conj({C.local[i], roots_x, exists(xs, conj(in))});
    eqk.emplace(key, f);
    return f;
  };

  // chi_i^r: the components of phi_i with exactly k roots contribute k
  // elements each, so |H_k| = a (mod p) iff k|H_k| = ka (mod kp); their
  // number is the sum of the |H_k|.
  std::map<std::pair<int, int>, Formula> chi;
  auto residue = [&](int i, int r) {
    auto key = std::make_pair(i, r);
    auto it = chi.find(key);
    if (it != chi.end()) return it->second;
    std::vector<Formula> alts;
    std::vector<int> a(b + 1, 0);
    std::function<void(int, int)> rec = [&](int k, int sum) {
      if (k > b) {
        if (sum % p != r) return;
        std::vector<Formula> parts;
        for (int kk = 1; kk <= b; ++kk) parts.push_back(exists_mod(kk * a[kk], kk * p, x, phi_eq(i, kk)));
        alts.push_back(conj(parts));
        return;
      }
      for (int v = 0; v < p; ++v) {
        a[k] = v;
        rec(k + 1, (sum + v) % p);
      }
    };
    rec(1, 0);
    Formula f = disj(alts);
    chi.emplace(key, f);
    return f;
  };

  std::vector<Formula> alts;
  for (auto& [c, r] : R) {
    std::vector<Formula> parts{C.exactly(c)};
    for (size_t i = 0; i < c.size(); ++i) parts.push_back(residue(static_cast<int>(i), r[i]));
    alts.push_back(conj(parts));
  }
  return disj(alts);
}

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::OIFO: return "oifo";
    case Pipeline::MSO: return "mso";
    case Pipeline::OIMSO: return "oimso";
  }
  return "?";
}

Pipeline parse_pipeline(const std::string& s) {
  if (s == "oifo") return Pipeline::OIFO;
  if (s == "mso") return Pipeline::MSO;
  if (s == "oimso") return Pipeline::OIMSO;
  throw InputError("unknown pipeline '" + s + "'");
}

// ------------------------------------------------------------------ R sets

namespace {

struct Powers {
  std::vector<TypeId> conn;
  std::vector<std::vector<TypeId>> pw;
  TypeId unit = -1;
  explicit Powers(const std::vector<TypeId>& c) : conn(c), pw(c.size()) {
    if (!c.empty()) unit = empty_type(type_node(c[0]).ctx, type_q(c[0]));
  }
  TypeId power(size_t i, int n) {
    auto& v = pw[i];
    if (v.empty()) v.push_back(unit);
    while (static_cast<int>(v.size()) <= n) v.push_back(compose(v.back(), conn[i]));
    return v[n];
  }
};

void for_each_vector(const std::vector<TypeId>& conn, int t, size_t limit,
                     const std::function<void(const CountVec&, TypeId)>& cb) {
  double total = std::pow(t + 1.0, static_cast<double>(conn.size()));
  if (total > static_cast<double>(limit))
    throw BudgetError("count vectors: " + std::to_string(static_cast<long long>(total)) + " exceed the limit");
  Powers P(conn);
  CountVec v(conn.size(), 0);
  std::function<void(size_t, TypeId)> rec = [&](size_t i, TypeId acc) {
    if (i == conn.size()) {
      cb(v, acc);
      return;
    }
    for (int n = 0; n <= t; ++n) {
      v[i] = n;
      rec(i + 1, compose(acc, P.power(i, n)));
    }
  };
  if (conn.empty()) return;
  rec(0, P.unit);
}

// (capped, residue) pairs; a count n >= p stands for p + ((r - p) mod p)
void for_each_mod_vector(const std::vector<TypeId>& conn, int p, size_t limit,
                         const std::function<void(const ModVec&, TypeId)>& cb) {
  double total = std::pow(2.0 * p, static_cast<double>(conn.size()));
  if (total > static_cast<double>(limit))
    throw BudgetError("count vectors: " + std::to_string(static_cast<long long>(total)) + " exceed the limit");
  Powers P(conn);
  ModVec v{CountVec(conn.size(), 0), CountVec(conn.size(), 0)};
  std::function<void(size_t, TypeId)> rec = [&](size_t i, TypeId acc) {
    if (i == conn.size()) {
      cb(v, acc);
      return;
    }
    for (int c = 0; c < p; ++c) {
      v.first[i] = c;
      v.second[i] = c % p;
      rec(i + 1, compose(acc, P.power(i, c)));
    }
    for (int r = 0; r < p; ++r) {
      v.first[i] = p;
      v.second[i] = r;
      int n = p + ((r - p) % p + p) % p;
      rec(i + 1, compose(acc, P.power(i, n)));
    }
  };
  if (conn.empty()) return;
  rec(0, P.unit);
}

void for_each_mod_counts(size_t l, int p, size_t limit, const std::function<void(const ModVec&, const CountVec&)>& cb) {
  double total = std::pow(2.0 * p, static_cast<double>(l));
  if (total > static_cast<double>(limit))
    throw BudgetError("count vectors: " + std::to_string(static_cast<long long>(total)) + " exceed the limit");
  ModVec v{CountVec(l, 0), CountVec(l, 0)};
  CountVec n(l, 0);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == l) {
      cb(v, n);
      return;
    }
    for (int c = 0; c < 2 * p; ++c) {
      v.first[i] = std::min(c, p);
      v.second[i] = c % p;
      n[i] = c;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace

TypeId type_of_counts(const std::vector<TypeId>& conn, const CountVec& n) {
  if (conn.size() != n.size()) throw InputError("type_of_counts: length mismatch");
  if (conn.empty()) throw InputError("type_of_counts: no connected types");
  Powers P(conn);
  TypeId acc = P.unit;
  for (size_t i = 0; i < conn.size(); ++i) acc = compose(acc, P.power(i, n[i]));
  return acc;
}

std::set<CountVec> compute_R(const std::function<bool(TypeId)>& target, const std::vector<TypeId>& conn, int t) {
  std::set<CountVec> R;
  for_each_vector(conn, t, SIZE_MAX, [&](const CountVec& v, TypeId th) {
    if (target(th)) R.insert(v);
  });
  return R;
}

std::set<ModVec> compute_R_mod(const std::function<bool(TypeId)>& target, const std::vector<TypeId>& conn, int p) {
  std::set<ModVec> R;
  for_each_mod_vector(conn, p, SIZE_MAX, [&](const ModVec& v, TypeId th) {
    if (target(th)) R.insert(v);
  });
  return R;
}

// ------------------------------------------------------------------ pipelines

int measured_root_bound(const Signature& sig, int d, int max_size, bool graph_mode) {
  static std::map<std::tuple<std::string, int, int, bool>, int> cache;
  auto key = std::make_tuple(sig.str(), d, max_size, graph_mode);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  EnumOptions eo;
  eo.min_size = 1;
  eo.max_size = max_size;
  eo.td = d;
  eo.connected = true;
  eo.graph_mode = graph_mode;
  int b = 1;
  enum_structures(sig, eo, [&](const Structure& A) {
    b = std::max(b, static_cast<int>(roots_of(A).size()));
    return true;
  });
  cache.emplace(key, b);
  return b;
}

int threshold(ThresholdMode mode, Pipeline kind, int q, const Level& lv) {
  if (mode == ThresholdMode::Paper) {
    if (kind == Pipeline::OIFO) return (1 << q) + 1;
    if (kind == Pipeline::MSO) {
      int k = 1;
      for (auto& r : lv.reps) k = std::max(k, shrink_model(r, Logic::MSO, q).s.n);
      if (static_cast<double>(k) * q > 30) throw BudgetError("paper threshold 2^(kq) too large");
      return 1 << (k * q);
    }
  }
  int t = 1;
  for (int x : lv.thresholds) {
    if (x < 0) throw BudgetError("threshold: a connected type does not stabilize");
    t = std::max(t, x);
  }
  return t;
}

namespace {

struct Builder {
  Pipeline kind;
  Formula phi;
  int q;
  TranslateOptions opt;
  Logic L1;
  bool ordered;
  Fresh fresh;
  std::vector<Level> levels;
  bool word_mode = false;
  int dfa_states = 0;

  TypeId type_of(const Structure& A) { return ordered ? tp_ordered(L1, q, A) : tp_recursive(L1, q, A); }

  void build_universes(const Signature& sig) {
    Level top;
    top.sig = sig;
    top.td = opt.d;
    EnumOptions eo;
    eo.min_size = 1;
    eo.max_size = opt.max_size;
    eo.td = opt.d;
    eo.connected = true;
    eo.graph_mode = opt.graph_mode;
    top.universe = enum_structures(sig, eo);
    levels.push_back(std::move(top));
    for (int j = 0; j + 1 < opt.d; ++j) {
      Level nx;
      nx.sig = levels[j].sig.expand();
      nx.td = opt.d - j - 1;
      std::set<std::string> seen;
      for (auto& A : levels[j].universe) {
        if (A.n <= 1) continue;
        for (int r : roots_of(A)) {
          auto B = remove_and_expand(A, r);
          for (auto& c : components(B.s))
            if (seen.insert(canonical_form(c.s)).second) nx.universe.push_back(c.s);
        }
      }
      std::stable_sort(nx.universe.begin(), nx.universe.end(),
                       [](const Structure& a, const Structure& b) { return a.n < b.n; });
      levels.push_back(std::move(nx));
    }
  }

  void type_level(Level& lv, int j) {
    std::map<TypeId, size_t> at;
    std::vector<std::pair<TypeId, Structure>> found;
    for (auto& A : lv.universe) {
      budget::check();
      TypeId t = type_of(A);
      if (!at.count(t)) {
        at[t] = found.size();
        found.push_back({t, A});
      }
    }
    std::sort(found.begin(), found.end(), [](auto& a, auto& b) { return type_compare(a.first, b.first) < 0; });
    for (auto& [t, A] : found) {
      lv.conn.push_back(t);
      lv.reps.push_back(A);
      int th = -1;
      if (kind != Pipeline::OIMSO) try {
          th = stabilization_threshold(t);
        } catch (const BudgetError&) {
        }
      lv.thresholds.push_back(th);
    }
    if (kind == Pipeline::OIMSO) {
      if (word_mode) {
        // period of the sentence's syntactic monoid, letters = singleton types
        Dfa a = compile_word_sentence(phi, lv.sig);
        std::vector<uint32_t> letters;
        for (auto& r : lv.reps) letters.push_back(word_letter(r, 0));
        lv.p = dfa_letter_period(a, letters);
        dfa_states = a.states();
      } else {
        lv.p = lv.conn.empty() ? 1 : pumping_period(lv.conn);
      }
      lv.t = lv.p;
      int b = 1;
      for (auto& A : lv.universe) b = std::max(b, static_cast<int>(roots_of(A).size()));
      if (j == 0 && opt.b > 0) {
        if (opt.b < b) throw DomainError("root bound b=" + std::to_string(opt.b) + " below measured " + std::to_string(b));
        b = opt.b;
      } else if (j == 0) {
        b = std::max(b, measured_root_bound(Signature({{"E", 2}}), lv.td, 8, true));
      }
      lv.b = b;
    } else {
      lv.t = threshold(opt.mode, kind, q, lv);
    }
  }

  Formula singleton_part(const Level& lv, TypeId tau, const std::string& x) {
    std::vector<Formula> alts;
    for (auto& a : all_atomic_types(lv.sig)) {
      Structure S(lv.sig, 1);
      for (auto& s : a) S.add(s, Tuple(lv.sig[lv.sig.index(s)].arity, 0));
      if (type_of(S) == tau) alts.push_back(exists(x, build_atomic(lv.sig, a, x)));
    }
    return disj(alts);
  }

  void define_level(int j) {
    Level& lv = levels[j];
    std::string x = "x", y = "y";
    if (lv.td == 1) {
      for (TypeId tau : lv.conn) lv.definers.push_back(singleton_part(lv, tau, x));
      return;
    }
    Level& nx = levels[j + 1];
    auto atoms = all_atomic_types(lv.sig);
    // R_tau as (atomic type, theta) index pairs
    std::map<TypeId, std::vector<std::pair<size_t, size_t>>> R;
    std::set<TypeId> conn(lv.conn.begin(), lv.conn.end());
    for (size_t a = 0; a < atoms.size(); ++a)
      for (size_t th = 0; th < nx.full.size(); ++th) {
        TypeId tau = add_root_type(lv.sig, atoms[a], nx.full[th]);
        if (conn.count(tau)) R[tau].push_back({a, th});
      }
    Formula roots_x = build_roots(lv.sig, lv.td, x, fresh);
    Formula roots_y = rename1(roots_x, x, y, fresh);
    std::vector<Formula> I_x, I_y;
    for (auto& f : nx.full_definers) {
      Formula g = interpret_removed(f, lv.sig, x, fresh);
      I_x.push_back(g);
      I_y.push_back(rename1(g, x, y, fresh));
    }
    Formula td_le1 = build_td_leq(lv.sig, 1, fresh, preferred_td_mode(1));
    std::map<size_t, Formula> xi;
    auto xi_of = [&](size_t a) {
      auto it = xi.find(a);
      if (it != xi.end()) return it->second;
      std::vector<Formula> above;
      for (auto& b : atoms)
        if (atomic_compare(b, atoms[a]) >= 0) above.push_back(build_atomic(lv.sig, b, x));
      Formula f = conj(exists(x, conj(roots_x, build_atomic(lv.sig, atoms[a], x))),
                       forall(x, implies(roots_x, disj(above))));
      xi.emplace(a, f);
      return f;
    };
    for (TypeId tau : lv.conn) {
      std::vector<Formula> alts;
      for (auto [a, th] : R[tau]) {
        Formula al_x = build_atomic(lv.sig, atoms[a], x);
        if (!ordered) {
          alts.push_back(exists(x, conj({roots_x, al_x, I_x[th]})));
          continue;
        }
        std::vector<Formula> above;
        for (size_t th2 = 0; th2 < nx.full.size(); ++th2)
          if (type_compare(nx.full[th2], nx.full[th]) >= 0) above.push_back(I_y[th2]);
        Formula al_y = build_atomic(lv.sig, atoms[a], y);
        Formula chi = conj(forall(y, implies(conj(roots_y, al_y), disj(above))),
                           exists(x, conj({roots_x, al_x, I_x[th]})));
        alts.push_back(conj(xi_of(a), chi));
      }
      Formula hat = singleton_part(lv, tau, x);
      if (ordered)
        lv.definers.push_back(disj(conj(td_le1, hat), conj(neg(td_le1), disj(alts))));
      else
        lv.definers.push_back(disj(conj(td_le1, hat), disj(alts)));
    }
  }

  // all union types of level j and a definer for each
  void define_full(int j) {
    Level& lv = levels[j];
    std::map<TypeId, size_t> at;
    auto slot = [&](TypeId th) {
      auto it = at.find(th);
      if (it != at.end()) return it->second;
      at[th] = lv.full.size();
      lv.full.push_back(th);
      lv.full_R.emplace_back();
      lv.full_RM.emplace_back();
      return lv.full.size() - 1;
    };
    if (lv.conn.empty()) {
      Structure E(lv.sig, 0);
      slot(type_of(E));
      lv.full_R[0].insert(CountVec{});
      lv.full_definers.push_back(f_true());
      return;
    }
    if (kind == Pipeline::OIMSO)
      for_each_mod_vector(lv.conn, lv.p, opt.max_vectors, [&](const ModVec& v, TypeId th) { lv.full_RM[slot(th)].insert(v); });
    else
      for_each_vector(lv.conn, lv.t, opt.max_vectors, [&](const CountVec& v, TypeId th) { lv.full_R[slot(th)].insert(v); });
    for (size_t i = 0; i < lv.full.size(); ++i) {
      budget::check();
      if (kind == Pipeline::OIMSO)
        lv.full_definers.push_back(mod_count_formula(lv.sig, lv.definers, lv.full_RM[i], lv.p, lv.td, lv.b, fresh));
      else
        lv.full_definers.push_back(count_formula(lv.sig, lv.definers, lv.full_R[i], lv.t, lv.td, fresh));
    }
  }
};

}  // namespace

TranslateResult translate(Pipeline kind, const Formula& phi, const Signature& sig, const TranslateOptions& opt) {
  if (opt.d < 1) throw InputError("translate: d must be at least 1");
  if (!free_vars(phi).empty() || !free_set_vars(phi).empty()) throw InputError("translate: sentence expected");
  Logic lg = logic_of(phi);
  if (lg == Logic::FOMOD || lg == Logic::MSOMOD) throw InputError("translate: modulo quantifiers in the input");
  if (kind == Pipeline::OIFO && lg != Logic::FO) throw InputError("translate oifo: FO input expected");
  if (kind == Pipeline::MSO && uses_order(phi)) throw InputError("translate mso: input must not use <=");
  for (auto& r : relation_names(phi))
    if (!sig.contains(r)) throw InputError("translate: unknown relation " + r);

  Builder B{kind, phi, quantifier_rank(phi), opt, kind == Pipeline::OIFO ? Logic::FO : Logic::MSO,
            kind != Pipeline::MSO, {}, {}};
  B.word_mode = kind == Pipeline::OIMSO &&
                (opt.period == PeriodSource::Automaton || (opt.period == PeriodSource::Auto && opt.d == 1));
  if (B.word_mode && opt.d != 1) throw DomainError("automaton period needs d = 1");
  B.build_universes(sig);
  for (int j = static_cast<int>(B.levels.size()) - 1; j >= 0; --j) {
    B.type_level(B.levels[j], j);
    B.define_level(j);
    if (j > 0) B.define_full(j);
  }
  Level& top = B.levels[0];
  TranslateResult res;
  res.kind = kind;
  res.q = B.q;
  res.d = opt.d;
  res.t = top.t;
  res.p = top.p;
  res.b = top.b;
  if (kind == Pipeline::OIMSO) res.period_source = B.word_mode ? "automaton" : "types";
  res.dfa_states = B.dfa_states;
  res.conn_types = top.conn.size();
  auto target = [&](TypeId th) { return eval_on_type(phi, th); };
  if (top.conn.empty()) {
    Structure E(sig, 0);
    res.psi = eval_on_type(phi, B.type_of(E)) ? f_true() : f_false();
  } else if (kind == Pipeline::OIMSO) {
    std::set<ModVec> R;
    if (B.word_mode) {
      // phi evaluated on the q-ordered union of representatives
      Evaluator ev(phi);
      for_each_mod_counts(top.conn.size(), top.p, opt.max_vectors, [&](const ModVec& v, const CountVec& n) {
        Structure U(sig, 0);
        for (size_t i = 0; i < n.size(); ++i)
          for (int c = 0; c < n[i]; ++c) U = disjoint_union(U, top.reps[i]);
        if (ev.eval(q_order(Logic::MSO, B.q, U))) R.insert(v);
      });
    } else {
      for_each_mod_vector(top.conn, top.p, opt.max_vectors, [&](const ModVec& v, TypeId th) {
        if (target(th)) R.insert(v);
      });
    }
    res.R_size = R.size();
    res.psi = mod_count_formula(sig, top.definers, R, top.p, opt.d, top.b, B.fresh);
  } else {
    std::set<CountVec> R;
    for_each_vector(top.conn, top.t, opt.max_vectors, [&](const CountVec& v, TypeId th) {
      if (target(th)) R.insert(v);
    });
    res.R_size = R.size();
    res.psi = count_formula(sig, top.definers, R, top.t, opt.d, B.fresh);
  }
  res.m = metrics(res.psi);
  res.levels = std::move(B.levels);
  return res;
}

TranslateResult translate_oifo(const Formula& phi, const Signature& sig, const TranslateOptions& opt) {
  return translate(Pipeline::OIFO, phi, sig, opt);
}
TranslateResult translate_mso(const Formula& phi, const Signature& sig, const TranslateOptions& opt) {
  return translate(Pipeline::MSO, phi, sig, opt);
}
TranslateResult translate_oimso(const Formula& phi, const Signature& sig, const TranslateOptions& opt) {
  return translate(Pipeline::OIMSO, phi, sig, opt);
}

VerifyReport verify_equivalence(const Formula& phi, const Formula& psi, const Signature& sig, int d, int max_size,
                                bool ordered_side, bool graph_mode) {
  VerifyReport rep;
  rep.max_size = max_size;
  if (max_size < 0) return rep;
  Evaluator ephi(phi), epsi(psi);
  Logic L = (logic_of(phi) == Logic::MSO || logic_of(phi) == Logic::MSOMOD) ? Logic::MSO : Logic::FO;
  int q = quantifier_rank(phi);
  EnumOptions eo;
  eo.max_size = max_size;
  eo.td = d;
  eo.graph_mode = graph_mode;
  enum_structures(sig, eo, [&](const Structure& A) {
    budget::check();
    bool a = ordered_side ? ephi.eval(q_order(L, q, A)) : ephi.eval(A);
    bool b = epsi.eval(A);
    if (a != b) {
      rep.ok = false;
      rep.mismatch = A;
      rep.mismatch_index = rep.checked;
      rep.phi_value = a;
      rep.psi_value = b;
      return false;
    }
    ++rep.checked;
    return true;
  });
  return rep;
}

}  // namespace tdl
