#include "tdl/eval.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tdl/enumerate.hpp"
#include "tdl/treedepth.hpp"

namespace tdl {

Env parse_env(const std::string& text) {
  Env env;
  size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
  };
  while (true) {
    skip();
    if (i >= text.size()) break;
    size_t eqp = text.find('=', i);
    if (eqp == std::string::npos) throw InputError("env: expected name=value");
    std::string name = text.substr(i, eqp - i);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    i = eqp + 1;
    while (i < text.size() && text[i] == ' ') ++i;
    if (i < text.size() && text[i] == '{') {
      size_t e = text.find('}', i);
      if (e == std::string::npos) throw InputError("env: unterminated set");
      uint64_t m = 0;
      std::stringstream ss(text.substr(i + 1, e - i - 1));
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(' ') == std::string::npos) continue;
        int v = std::stoi(tok);
        if (v < 0 || v >= 64) throw InputError("env: set element out of range");
        m |= uint64_t{1} << v;
      }
      env.so[name] = m;
      i = e + 1;
    } else {
      size_t e = i;
      while (e < text.size() && text[e] != ',') ++e;
      std::string v = text.substr(i, e - i);
      if (v.empty() || v.find_first_not_of("0123456789 ") != std::string::npos)
        throw InputError("env: bad element for " + name);
      env.fo[name] = std::stoi(v);
      i = e;
    }
  }
  return env;
}

// ------------------------------------------------------------------ preprocessing

namespace {

struct FreeCache {
  std::unordered_map<const Node*, std::set<std::string>> fo, so;
  const std::set<std::string>& get(const Formula& g, bool set) {
    auto& m = set ? so : fo;
    auto it = m.find(g.get());
    if (it != m.end()) return it->second;
    std::set<std::string> s;
    switch (g->kind) {
      case Kind::Atom:
      case Kind::Eq:
      case Kind::Leq:
        if (!set) s.insert(g->args.begin(), g->args.end());
        break;
      case Kind::SetAtom:
        if (set)
          s.insert(g->name);
        else
          s.insert(g->args[0]);
        break;
      default: {
        for (auto& k : g->kids) {
          auto& c = get(k, set);
          s.insert(c.begin(), c.end());
        }
        bool binds = set ? (g->kind == Kind::ExistsSet || g->kind == Kind::ForallSet)
                         : (g->kind == Kind::Exists || g->kind == Kind::Forall || g->kind == Kind::ExistsMod);
        if (binds) s.erase(g->name);
      }
    }
    return m[g.get()] = std::move(s);
  }
  bool has(const Formula& g, const std::string& v, bool set) { return get(g, set).count(v) > 0; }
};

bool quantifier_free(const Formula& g, std::unordered_map<const Node*, bool>& memo) {
  auto it = memo.find(g.get());
  if (it != memo.end()) return it->second;
  bool r = !is_quantifier(g->kind);
  if (r)
    for (auto& k : g->kids)
      if (!quantifier_free(k, memo)) {
        r = false;
        break;
      }
  return memo[g.get()] = r;
}

// Pull conjuncts (disjuncts) that do not mention the bound variable out of
// existential (universal) scopes and distribute over the matching connective.
// Input is in NNF.
struct Miniscoper {
  FreeCache fc;
  std::unordered_map<const Node*, Formula> memo;
  std::unordered_map<const Node*, bool> qf;

  Formula quant(Kind k, const std::string& x, const Formula& body) {
    bool set = k == Kind::ExistsSet || k == Kind::ForallSet;
    bool ex = k == Kind::Exists || k == Kind::ExistsSet;
    Kind same = ex ? Kind::Or : Kind::And;     // distributes
    Kind other = ex ? Kind::And : Kind::Or;    // pull out independent parts
    if (!fc.has(body, x, set)) {
      // exists x. B == B & exists x. true (the universe may be empty)
      Formula q = make_node(k, x, {}, {ex ? f_true() : f_false()});
      return ex ? conj(body, q) : disj(body, q);
    }
    if (body->kind == same) {
      std::vector<Formula> parts;
      for (auto& c : body->kids) parts.push_back(quant(k, x, c));
      return ex ? disj(parts) : conj(parts);
    }
    if (body->kind == other) {
      std::vector<Formula> with, without;
      for (auto& c : body->kids) (fc.has(c, x, set) ? with : without).push_back(c);
      if (!without.empty()) {
        Formula inner = ex ? conj(with) : disj(with);
        without.push_back(quant(k, x, inner));
        return ex ? conj(without) : disj(without);
      }
    }
    return make_node(k, x, {}, {body});
  }

  Formula order_kids(Formula g) {
    if (g->kind != Kind::And && g->kind != Kind::Or) return g;
    std::vector<Formula> cheap, dear;
    for (auto& c : g->kids) (quantifier_free(c, qf) ? cheap : dear).push_back(c);
    if (cheap.empty() || dear.empty()) return g;
    cheap.insert(cheap.end(), dear.begin(), dear.end());
    return make_node(g->kind, "", {}, cheap);
  }

  Formula go(const Formula& g) {
    if (is_atomic(g->kind)) return g;
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    Formula r;
    switch (g->kind) {
      case Kind::Not: r = g; break;  // NNF: only in front of atoms
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> k;
        for (auto& c : g->kids) k.push_back(go(c));
        r = order_kids(g->kind == Kind::And ? conj(k) : disj(k));
        break;
      }
      case Kind::ExistsMod: r = make_node(Kind::ExistsMod, g->name, {}, {go(g->kids[0])}, g->i, g->p); break;
      default: r = quant(g->kind, g->name, go(g->kids[0])); break;
    }
    return memo[g.get()] = r;
  }
};

}  // namespace

// ------------------------------------------------------------------ compiled DAG

namespace {

struct Slot {
  std::string name;
  bool set;
  bool operator==(const Slot&) const = default;
};

struct CNode {
  Kind kind;
  int rel = -1;               // index into Impl::rels for atoms
  std::vector<int> argslots;  // atoms
  int nslots = 0;
  std::vector<bool> slot_is_set;
  std::vector<std::pair<int, std::vector<int>>> kids;  // child, child slot -> parent (extended) slot
  int i = 0, p = 1;
  bool memo = false;
  int bound_set = 0;  // quantifier binds a set variable
};

struct VecHash {
  size_t operator()(const std::vector<uint64_t>& v) const {
    uint64_t h = 1469598103934665603ull;
    for (auto x : v) h = hash_mix(h, x);
    return h;
  }
};

}  // namespace

struct Evaluator::Impl {
  std::vector<CNode> nodes;
  std::vector<std::string> rels;
  int root = -1;
  std::vector<Slot> root_slots;
  std::vector<std::string> free_fo, free_so;

  // compile-time helpers
  std::unordered_map<std::string, int> intern;
  std::unordered_map<const Node*, std::pair<int, std::vector<Slot>>> done;

  int rel_index(const std::string& name) {
    for (size_t i = 0; i < rels.size(); ++i)
      if (rels[i] == name) return static_cast<int>(i);
    rels.push_back(name);
    return static_cast<int>(rels.size()) - 1;
  }

  static void add_slot(std::vector<Slot>& v, const Slot& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  }

  // returns (id, ordered free slots)
  std::pair<int, std::vector<Slot>> compile(const Formula& g) {
    auto it = done.find(g.get());
    if (it != done.end()) return it->second;
    CNode c;
    c.kind = g->kind;
    c.i = g->i;
    c.p = g->p;
    std::vector<Slot> slots;
    std::string key = std::to_string(static_cast<int>(g->kind)) + "|" + std::to_string(g->i) + "," +
                      std::to_string(g->p) + "|";
    switch (g->kind) {
      case Kind::True:
      case Kind::False: break;
      case Kind::Atom:
      case Kind::Eq:
      case Kind::Leq:
      case Kind::SetAtom: {
        if (g->kind == Kind::Atom && g->name == "<=") {
          if (g->args.size() != 2) throw InputError("<= is binary");
          c.kind = Kind::Leq;
        } else if (g->kind == Kind::Atom) {
          c.rel = rel_index(g->name);
          key += g->name;
        }
        if (g->kind == Kind::SetAtom) {
          add_slot(slots, {g->name, true});
          add_slot(slots, {g->args[0], false});
          c.argslots = {0, static_cast<int>(std::find(slots.begin(), slots.end(), Slot{g->args[0], false}) - slots.begin())};
          key += "S";
        } else {
          for (auto& a : g->args) add_slot(slots, {a, false});
          for (auto& a : g->args)
            c.argslots.push_back(static_cast<int>(std::find(slots.begin(), slots.end(), Slot{a, false}) - slots.begin()));
        }
        key = std::to_string(static_cast<int>(c.kind)) + key;
        for (int a : c.argslots) key += "," + std::to_string(a);
        break;
      }
      default: {
        std::vector<std::pair<int, std::vector<Slot>>> ks;
        for (auto& k : g->kids) ks.push_back(compile(k));
        bool q = is_quantifier(g->kind);
        Slot bound{g->name, g->kind == Kind::ExistsSet || g->kind == Kind::ForallSet};
        for (auto& [id, ss] : ks)
          for (auto& s : ss)
            if (!(q && s == bound)) add_slot(slots, s);
        int ext = static_cast<int>(slots.size());
        for (auto& [id, ss] : ks) {
          std::vector<int> map;
          for (auto& s : ss) {
            if (q && s == bound)
              map.push_back(ext);
            else
              map.push_back(static_cast<int>(std::find(slots.begin(), slots.end(), s) - slots.begin()));
          }
          key += std::to_string(id) + ":";
          for (int m : map) key += std::to_string(m) + ",";
          key += ";";
          c.kids.push_back({id, map});
        }
        c.bound_set = bound.set ? 1 : 0;
      }
    }
    c.nslots = static_cast<int>(slots.size());
    for (auto& s : slots) {
      c.slot_is_set.push_back(s.set);
      key += s.set ? "S" : "F";
    }
    int id;
    auto f = intern.find(key);
    if (f != intern.end()) {
      id = f->second;
    } else {
      id = static_cast<int>(nodes.size());
      nodes.push_back(std::move(c));
      intern.emplace(key, id);
    }
    return done[g.get()] = {id, slots};
  }

  void finish() {
    std::vector<int> indeg(nodes.size(), 0);
    for (auto& n : nodes)
      for (auto& k : n.kids) ++indeg[k.first];
    for (size_t i = 0; i < nodes.size(); ++i) {
      auto& n = nodes[i];
      n.memo = !n.kids.empty() && (is_quantifier(n.kind) || indeg[i] > 1);
    }
    intern.clear();
    done.clear();
  }

  // ---- evaluation state (one call)
  struct Run {
    const Impl* im;
    int n;
    std::vector<std::vector<char>> bits;  // per formula relation
    std::vector<int> arity;
    std::vector<int> rank;
    bool ordered;
    std::vector<uint64_t> subsets;
    int ebits;
    std::vector<std::unordered_map<uint64_t, char>> fast;
    std::vector<std::unordered_map<std::vector<uint64_t>, char, VecHash>> slow;

    bool pack(const CNode& c, const uint64_t* v, uint64_t& out) const {
      int used = 0;
      out = 0;
      for (int s = 0; s < c.nslots; ++s) {
        int w = c.slot_is_set[s] ? n : ebits;
        if (used + w > 64) return false;
        out |= v[s] << used;
        used += w;
      }
      return true;
    }

    bool ev(int id, const uint64_t* v) {
      const CNode& c = im->nodes[id];
      switch (c.kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Atom: {
          size_t idx = 0;
          for (int k = static_cast<int>(c.argslots.size()) - 1; k >= 0; --k) idx = idx * n + v[c.argslots[k]];
          return bits[c.rel][idx];
        }
        case Kind::Eq: return v[c.argslots[0]] == v[c.argslots[1]];
        case Kind::Leq: return rank[v[c.argslots[0]]] <= rank[v[c.argslots[1]]];
        case Kind::SetAtom: return (v[c.argslots[0]] >> v[c.argslots[1]]) & 1;
        default: break;
      }
      uint64_t key = 0;
      bool packed = false;
      std::vector<uint64_t> vkey;
      if (c.memo) {
        packed = pack(c, v, key);
        if (packed) {
          auto it = fast[id].find(key);
          if (it != fast[id].end()) return it->second;
        } else {
          vkey.assign(v, v + c.nslots);
          auto it = slow[id].find(vkey);
          if (it != slow[id].end()) return it->second;
        }
      }
      budget::check();
      bool r = compute(c, v);
      if (c.memo) {
        if (packed)
          fast[id][key] = r;
        else
          slow[id][vkey] = r;
      }
      return r;
    }

    bool kid(const CNode& c, size_t k, const uint64_t* v, uint64_t* buf) {
      auto& [id, map] = c.kids[k];
      for (size_t j = 0; j < map.size(); ++j) buf[j] = v[map[j]];
      return ev(id, buf);
    }

    bool compute(const CNode& c, const uint64_t* v) {
      size_t width = 0;
      for (auto& k : c.kids) width = std::max(width, k.second.size());
      std::vector<uint64_t> buf(width + 1);
      std::vector<uint64_t> ext(v, v + c.nslots);
      ext.push_back(0);
      switch (c.kind) {
        case Kind::Not: return !kid(c, 0, v, buf.data());
        case Kind::And:
          for (size_t k = 0; k < c.kids.size(); ++k)
            if (!kid(c, k, v, buf.data())) return false;
          return true;
        case Kind::Or:
          for (size_t k = 0; k < c.kids.size(); ++k)
            if (kid(c, k, v, buf.data())) return true;
          return false;
        case Kind::Implies: return !kid(c, 0, v, buf.data()) || kid(c, 1, v, buf.data());
        case Kind::Exists:
          for (int e = 0; e < n; ++e) {
            ext.back() = e;
            if (kid(c, 0, ext.data(), buf.data())) return true;
          }
          return false;
        case Kind::Forall:
          for (int e = 0; e < n; ++e) {
            ext.back() = e;
            if (!kid(c, 0, ext.data(), buf.data())) return false;
          }
          return true;
        case Kind::ExistsSet:
          for (uint64_t s : subsets) {
            ext.back() = s;
            if (kid(c, 0, ext.data(), buf.data())) return true;
          }
          return false;
        case Kind::ForallSet:
          for (uint64_t s : subsets) {
            ext.back() = s;
            if (!kid(c, 0, ext.data(), buf.data())) return false;
          }
          return true;
        case Kind::ExistsMod: {
          int cnt = 0;
          for (int e = 0; e < n; ++e) {
            ext.back() = e;
            if (kid(c, 0, ext.data(), buf.data())) ++cnt;
          }
          return cnt % c.p == c.i;
        }
        default: throw std::logic_error("unexpected node");
      }
    }
  };
};

static std::vector<uint64_t> subsets_by_popcount(int n) {
  std::vector<uint64_t> v;
  if (n > 24) throw BudgetError("set quantifier over more than 24 elements");
  for (uint64_t s = 0; s < (uint64_t{1} << n); ++s) v.push_back(s);
  std::stable_sort(v.begin(), v.end(), [](uint64_t a, uint64_t b) { return std::popcount(a) < std::popcount(b); });
  return v;
}

Evaluator::Evaluator(const Formula& f) : impl_(std::make_unique<Impl>()) {
  Miniscoper ms;
  Formula g = ms.go(to_nnf(f));
  auto [id, slots] = impl_->compile(g);
  impl_->root = id;
  impl_->root_slots = slots;
  for (auto& s : slots) (s.set ? impl_->free_so : impl_->free_fo).push_back(s.name);
  impl_->finish();
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

const std::vector<std::string>& Evaluator::free_fo() const { return impl_->free_fo; }
const std::vector<std::string>& Evaluator::free_so() const { return impl_->free_so; }
size_t Evaluator::compiled_nodes() const { return impl_->nodes.size(); }

bool Evaluator::eval(const Structure& A, const Env& env) const { return eval_batch(A, {env})[0]; }

std::vector<bool> Evaluator::eval_batch(const Structure& A, const std::vector<Env>& envs) const {
  const Impl& im = *impl_;
  if (A.n > 64) throw DomainError("eval: more than 64 elements");
  Impl::Run run{&im, A.n};
  for (auto& name : im.rels) {
    int s = A.sig.index(name);
    if (s < 0) throw InputError("formula uses symbol '" + name + "' missing from the structure");
    int k = A.sig[s].arity;
    size_t sz = 1;
    for (int i = 0; i < k; ++i) sz *= static_cast<size_t>(std::max(A.n, 1));
    if (sz > (size_t{1} << 28)) throw BudgetError("relation table too large");
    std::vector<char> b(sz, 0);
    for (auto& t : A.rel[s]) {
      size_t idx = 0;
      for (int i = k - 1; i >= 0; --i) idx = idx * A.n + t[i];
      b[idx] = 1;
    }
    run.bits.push_back(std::move(b));
    run.arity.push_back(k);
  }
  run.ordered = A.ordered();
  run.rank = A.order_rank();
  bool needs_order = false;
  bool needs_sets = false;
  for (auto& c : im.nodes) {
    if (c.kind == Kind::Leq) needs_order = true;
    if (c.kind == Kind::ExistsSet || c.kind == Kind::ForallSet) needs_sets = true;
  }
  if (needs_order && !A.ordered()) throw InputError("formula uses <= but the structure is unordered");
  if (needs_sets) run.subsets = subsets_by_popcount(A.n);
  run.ebits = 1;
  while ((1 << run.ebits) < std::max(A.n, 2)) ++run.ebits;
  run.fast.resize(im.nodes.size());
  run.slow.resize(im.nodes.size());
  std::vector<bool> out;
  for (auto& env : envs) {
    std::vector<uint64_t> vals;
    for (auto& s : im.root_slots) {
      if (s.set) {
        auto it = env.so.find(s.name);
        if (it == env.so.end()) throw InputError("unbound set variable " + s.name);
        if (A.n < 64 && (it->second >> A.n)) throw InputError("set " + s.name + " has elements outside the universe");
        vals.push_back(it->second);
      } else {
        auto it = env.fo.find(s.name);
        if (it == env.fo.end()) throw InputError("unbound variable " + s.name);
        if (it->second < 0 || it->second >= A.n) throw InputError("variable " + s.name + " out of range");
        vals.push_back(static_cast<uint64_t>(it->second));
      }
    }
    out.push_back(run.ev(im.root, vals.data()));
  }
  return out;
}

bool eval(const Structure& A, const Formula& f, const Env& env) { return Evaluator(f).eval(A, env); }

// ------------------------------------------------------------------ naive oracle

namespace {
bool naive(const Structure& A, const Formula& g, std::map<std::string, int>& fo, std::map<std::string, uint64_t>& so) {
  auto var = [&](const std::string& x) {
    auto it = fo.find(x);
    if (it == fo.end()) throw InputError("unbound variable " + x);
    return it->second;
  };
  auto bind = [&](auto& m, const std::string& x, auto val, auto&& body) {
    auto old = m.find(x);
    bool had = old != m.end();
    auto saved = had ? old->second : decltype(val){};
    m[x] = val;
    bool r = body();
    if (had)
      m[x] = saved;
    else
      m.erase(x);
    return r;
  };
  switch (g->kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: {
      if (g->name == "<=") {
        auto rk = A.order_rank();
        return rk[var(g->args[0])] <= rk[var(g->args[1])];
      }
      int s = A.sig.index(g->name);
      if (s < 0) throw InputError("unknown symbol " + g->name);
      Tuple t;
      for (auto& a : g->args) t.push_back(var(a));
      return A.holds(s, t);
    }
    case Kind::Eq: return var(g->args[0]) == var(g->args[1]);
    case Kind::Leq: {
      if (!A.ordered()) throw InputError("formula uses <= but the structure is unordered");
      auto rk = A.order_rank();
      return rk[var(g->args[0])] <= rk[var(g->args[1])];
    }
    case Kind::SetAtom: {
      auto it = so.find(g->name);
      if (it == so.end()) throw InputError("unbound set variable " + g->name);
      return (it->second >> var(g->args[0])) & 1;
    }
    case Kind::Not: return !naive(A, g->kids[0], fo, so);
    case Kind::And:
      for (auto& k : g->kids)
        if (!naive(A, k, fo, so)) return false;
      return true;
    case Kind::Or:
      for (auto& k : g->kids)
        if (naive(A, k, fo, so)) return true;
      return false;
    case Kind::Implies: return !naive(A, g->kids[0], fo, so) || naive(A, g->kids[1], fo, so);
    case Kind::Exists:
    case Kind::Forall: {
      bool ex = g->kind == Kind::Exists;
      for (int e = 0; e < A.n; ++e) {
        bool r = bind(fo, g->name, e, [&] { return naive(A, g->kids[0], fo, so); });
        if (r == ex) return ex;
      }
      return !ex;
    }
    case Kind::ExistsSet:
    case Kind::ForallSet: {
      bool ex = g->kind == Kind::ExistsSet;
      for (uint64_t s = 0; s < (uint64_t{1} << A.n); ++s) {
        bool r = bind(so, g->name, s, [&] { return naive(A, g->kids[0], fo, so); });
        if (r == ex) return ex;
      }
      return !ex;
    }
    case Kind::ExistsMod: {
      int cnt = 0;
      for (int e = 0; e < A.n; ++e)
        if (bind(fo, g->name, e, [&] { return naive(A, g->kids[0], fo, so); })) ++cnt;
      return cnt % g->p == g->i;
    }
  }
  return false;
}
}  // namespace

bool eval_naive(const Structure& A, const Formula& f, const Env& env) {
  auto fo = env.fo;
  auto so = env.so;
  return naive(A, f, fo, so);
}

// ------------------------------------------------------------------ invariance

InvarianceReport check_order_invariance(const Structure& A, const Formula& f) {
  if (A.n > 10) throw BudgetError("order invariance: more than 10! orders");
  Evaluator ev(f);
  InvarianceReport rep;
  std::vector<int> perm(A.n);
  std::iota(perm.begin(), perm.end(), 0);
  Structure B = without_order(A);
  bool first = true, r0 = false;
  do {
    budget::check();
    B.order = perm;
    bool r = ev.eval(B);
    ++rep.orders_checked;
    if (first) {
      r0 = r;
      rep.order1 = perm;
      first = false;
    } else if (r != r0) {
      rep.invariant = false;
      rep.order2 = perm;
      return rep;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  rep.order1.clear();
  return rep;
}

// ------------------------------------------------------------------ model search

namespace {

// Sentences preserved under induced substructures: NNF built from literals,
// and/or and universal first-order quantifiers.
bool pure_universal(const Formula& g) {
  switch (g->kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::Eq:
    case Kind::Leq:
    case Kind::Not: return g->kind != Kind::Not || is_atomic(g->kids[0]->kind);
    case Kind::And:
    case Kind::Or:
      return std::all_of(g->kids.begin(), g->kids.end(), [](auto& k) { return pure_universal(k); });
    case Kind::Forall: return pure_universal(g->kids[0]);
    default: return false;
  }
}

// z is bounded above by some other variable: z <= y or !(y <= z)
bool bounded_guard(const Formula& g, const std::string& z, bool ex) {
  auto check = [&](const Formula& k) {
    if (ex) {
      if (k->kind == Kind::Leq && k->args[0] == z && k->args[1] != z) return true;
      if (k->kind == Kind::Not && k->kids[0]->kind == Kind::Leq && k->kids[0]->args[1] == z &&
          k->kids[0]->args[0] != z)
        return true;
    } else {
      if (k->kind == Kind::Not && k->kids[0]->kind == Kind::Leq && k->kids[0]->args[0] == z &&
          k->kids[0]->args[1] != z)
        return true;
      if (k->kind == Kind::Leq && k->args[1] == z && k->args[0] != z) return true;
    }
    return false;
  };
  Kind conn = ex ? Kind::And : Kind::Or;
  if (g->kind == conn) return std::any_of(g->kids.begin(), g->kids.end(), check);
  return check(g);
}

// Truth does not change when passing to an order prefix that contains the
// free variables.
bool down_absolute(const Formula& g) {
  if (is_atomic(g->kind)) return true;
  switch (g->kind) {
    case Kind::Not: return down_absolute(g->kids[0]);
    case Kind::And:
    case Kind::Or:
      return std::all_of(g->kids.begin(), g->kids.end(), [](auto& k) { return down_absolute(k); });
    case Kind::Exists:
    case Kind::Forall:
      return bounded_guard(g->kids[0], g->name, g->kind == Kind::Exists) && down_absolute(g->kids[0]);
    default: return false;
  }
}

// Preserved under passing to order prefixes.
bool prefix_closed(const Formula& g) {
  if (down_absolute(g)) return true;
  switch (g->kind) {
    case Kind::And:
    case Kind::Or:
      return std::all_of(g->kids.begin(), g->kids.end(), [](auto& k) { return prefix_closed(k); });
    case Kind::Forall: return prefix_closed(g->kids[0]);
    default: return false;
  }
}

struct OrderedSearch {
  Signature sig;
  FindModelOptions opt;
  Evaluator full;
  std::vector<Evaluator> universal, prefix;
  std::optional<Structure> found;

  OrderedSearch(const Formula& f, const Signature& s, const FindModelOptions& o) : sig(s), opt(o), full(f) {
    Formula n = to_nnf(f);
    std::vector<Formula> cs = n->kind == Kind::And ? n->kids : std::vector<Formula>{n};
    for (auto& c : cs) {
      if (pure_universal(c))
        universal.emplace_back(c);
      else if (prefix_closed(c))
        prefix.emplace_back(c);
    }
  }

  static bool all(const std::vector<Evaluator>& es, const Structure& A) {
    for (auto& e : es)
      if (!e.eval(A)) return false;
    return true;
  }

  bool graph_binary(int s) const { return opt.graph_mode && sig[s].arity == 2; }

  // all tuples over `dom` (element list) that contain both a and b (a may equal b)
  std::vector<std::pair<int, Tuple>> new_tuples(const std::vector<int>& dom, int a, int b) const {
    std::vector<std::pair<int, Tuple>> out;
    for (int s = 0; s < sig.size(); ++s) {
      int k = sig[s].arity;
      std::vector<int> idx(k, 0);
      for (;;) {
        Tuple t(k);
        bool ha = false, hb = false;
        for (int i = 0; i < k; ++i) {
          t[i] = dom[idx[i]];
          ha |= t[i] == a;
          hb |= t[i] == b;
        }
        bool ok = ha && hb;
        if (ok && a != b) {
          // tuples with elements above b are decided later
          for (int e : t)
            if (e != a && e > b) ok = false;
        }
        if (ok && graph_binary(s) && (t[0] == t[1] || t[0] > t[1])) ok = false;
        if (ok) out.push_back({s, t});
        int i = 0;
        while (i < k && ++idx[i] == static_cast<int>(dom.size())) idx[i++] = 0;
        if (i == k) break;
      }
    }
    return out;
  }

  Structure induced_on(const Structure& P, const std::vector<int>& elems) const { return induced(P, elems).s; }

  void add_tuple(Structure& P, int s, const Tuple& t) const {
    P.rel[s].push_back(t);
    if (graph_binary(s)) P.rel[s].push_back({t[1], t[0]});
  }

  // decide tuples of element e against earlier elements u = 0..e-1 in turn
  bool extend(Structure& P, int e, int u, int N) {
    budget::check();
    if (u == e) {
      Structure Q = P;
      Q.normalize();
      std::vector<int> o(e + 1);
      std::iota(o.begin(), o.end(), 0);
      Q.order = o;
      if (!all(prefix, Q)) return false;
      if (opt.td_bound > 0 && Q.n > 0 && tree_depth(Q) > opt.td_bound) return false;
      if (e + 1 == N) {
        if (Q.n >= opt.min_size && full.eval(Q)) {
          found = Q;
          return true;
        }
        return false;
      }
      return place(Q, e + 1, N);
    }
    std::vector<int> dom;
    for (int i = 0; i <= u; ++i) dom.push_back(i);
    dom.push_back(e);
    auto cand = new_tuples(dom, e, u);
    if (cand.size() > 20) throw BudgetError("find_model: too many tuple choices per step");
    std::vector<std::vector<std::pair<int, Tuple>>> choices;
    // subsets by popcount then value
    std::vector<uint64_t> masks;
    for (uint64_t m = 0; m < (uint64_t{1} << cand.size()); ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(), [](uint64_t a, uint64_t b) { return std::popcount(a) < std::popcount(b); });
    for (uint64_t m : masks) {
      Structure R = P;
      for (size_t i = 0; i < cand.size(); ++i)
        if (m >> i & 1) add_tuple(R, cand[i].first, cand[i].second);
      R.normalize();
      std::vector<int> ord(dom);
      Structure S = induced_on(R, dom);
      std::vector<int> o(S.n);
      std::iota(o.begin(), o.end(), 0);
      S.order = o;
      if (!all(universal, S)) continue;
      if (extend(R, e, u + 1, N)) return true;
    }
    return false;
  }

  bool place(const Structure& prefixS, int e, int N) {
    Structure P(sig, e + 1);
    P.rel = prefixS.rel;
    P.rel.resize(sig.size());
    auto loops = new_tuples({e}, e, e);
    std::vector<uint64_t> masks;
    for (uint64_t m = 0; m < (uint64_t{1} << loops.size()); ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(), [](uint64_t a, uint64_t b) { return std::popcount(a) < std::popcount(b); });
    for (uint64_t m : masks) {
      Structure R = P;
      Structure single(sig, 1);
      for (size_t i = 0; i < loops.size(); ++i)
        if (m >> i & 1) {
          R.rel[loops[i].first].push_back(loops[i].second);
          single.rel[loops[i].first].push_back(Tuple(loops[i].second.size(), 0));
        }
      single.order = std::vector<int>{0};
      if (!all(universal, single)) continue;
      if (extend(R, e, 0, N)) return true;
    }
    return false;
  }

  std::optional<Structure> run() {
    for (int N = opt.min_size; N <= opt.max_size; ++N) {
      if (N == 0) {
        Structure E(sig, 0);
        E.order = std::vector<int>{};
        if (full.eval(E)) return E;
        continue;
      }
      Structure empty(sig, 0);
      if (place(empty, 0, N)) return found;
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<Structure> find_model(const Formula& f, const Signature& sig, const FindModelOptions& opt) {
  if (opt.ordered) {
    OrderedSearch s(f, sig, opt);
    return s.run();
  }
  Evaluator ev(f);
  for (int N = opt.min_size; N <= opt.max_size; ++N) {
    EnumOptions eo;
    eo.min_size = N;
    eo.max_size = N;
    eo.td = opt.td_bound;
    eo.graph_mode = opt.graph_mode;
    for (auto& A : enum_structures(sig, eo)) {
      budget::check();
      if (ev.eval(A)) return A;
    }
  }
  return std::nullopt;
}

}  // namespace tdl
