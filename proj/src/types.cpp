#include "tdl/types.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <mutex>
#include <unordered_map>

#include "tdl/treedepth.hpp"

namespace tdl {

namespace {

std::recursive_mutex g_mu;
using Lock = std::lock_guard<std::recursive_mutex>;

// ------------------------------------------------------------------ store

// deques: references handed out stay valid while the store grows
struct Store {
  std::deque<TypeCtx> ctxs;
  std::vector<uint64_t> ctx_hash;
  std::map<std::string, int> ctx_index;
  std::deque<TypeNode> nodes;
  std::unordered_map<std::string, TypeId> index;
};

Store& store() {
  static Store s;
  return s;
}

std::string ctx_key(const Signature& sig, bool ordered, Logic L) {
  return sig.str() + "|" + (ordered ? "o" : "u") + "|" + logic_name(L);
}

void put_int(std::string& s, int32_t v) { s.append(reinterpret_cast<const char*>(&v), sizeof v); }

TypeId intern(TypeNode n) {
  auto& S = store();
  std::sort(n.elem.begin(), n.elem.end());
  n.elem.erase(std::unique(n.elem.begin(), n.elem.end()), n.elem.end());
  std::sort(n.sets.begin(), n.sets.end());
  n.sets.erase(std::unique(n.sets.begin(), n.sets.end()), n.sets.end());
  std::string key;
  key.reserve(16 + n.base.size() + 4 * (n.elem.size() + n.sets.size()));
  put_int(key, n.ctx);
  put_int(key, n.q);
  put_int(key, n.k);
  put_int(key, n.m);
  put_int(key, static_cast<int32_t>(n.base.size()));
  key += n.base;
  put_int(key, static_cast<int32_t>(n.elem.size()));
  for (auto c : n.elem) put_int(key, c);
  for (auto c : n.sets) put_int(key, c);
  auto it = S.index.find(key);
  if (it != S.index.end()) return it->second;

  uint64_t h = hash_mix(S.ctx_hash[n.ctx], static_cast<uint64_t>(n.q) << 40 | static_cast<uint64_t>(n.k) << 20 | n.m);
  h = fnv1a(n.base, h);
  std::vector<uint64_t> ch;
  for (auto c : n.elem) ch.push_back(S.nodes[c].hash);
  std::sort(ch.begin(), ch.end());
  for (auto x : ch) h = hash_mix(h, x);
  h = hash_mix(h, 0x5e75);
  ch.clear();
  for (auto c : n.sets) ch.push_back(S.nodes[c].hash);
  std::sort(ch.begin(), ch.end());
  for (auto x : ch) h = hash_mix(h, x);
  n.hash = h;

  TypeId id = static_cast<TypeId>(S.nodes.size());
  S.nodes.push_back(std::move(n));
  S.index.emplace(std::move(key), id);
  return id;
}

// ------------------------------------------------------------------ layout

// Atom positions in TypeNode::base for k element and m set parameters:
// relation tuples over [k]^ar per symbol, then x_i = x_j and x_i <= x_j for
// i < j (k*k slots each), then X_j(x_i).
struct Layout {
  int k = 0, m = 0;
  bool ordered = false;
  std::vector<int> ar, rel_off;
  int eq_off = 0, leq_off = 0, mem_off = 0, size = 0;

  int rel(int s, const int* args) const {
    int idx = 0;
    for (int i = 0; i < ar[s]; ++i) idx = idx * k + args[i];
    return rel_off[s] + idx;
  }
  int eq(int i, int j) const { return eq_off + i * k + j; }
  int leq(int i, int j) const { return leq_off + i * k + j; }
  int mem(int j, int i) const { return mem_off + j * k + i; }
};

const Layout& layout(int ctx, int k, int m) {
  static std::map<std::tuple<int, int, int>, Layout> cache;
  auto key = std::make_tuple(ctx, k, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const TypeCtx& C = store().ctxs[ctx];
  Layout L;
  L.k = k;
  L.m = m;
  L.ordered = C.ordered;
  int off = 0;
  for (auto& s : C.sig.symbols()) {
    L.ar.push_back(s.arity);
    L.rel_off.push_back(off);
    int cnt = 1;
    for (int i = 0; i < s.arity; ++i) cnt *= k;
    off += cnt;
  }
  L.eq_off = off;
  off += k * k;
  L.leq_off = off;
  if (C.ordered) off += k * k;
  L.mem_off = off;
  off += m * k;
  L.size = off;
  return cache.emplace(key, std::move(L)).first->second;
}

bool base_eq(const TypeNode& n, const Layout& L, int i, int j) {
  if (i == j) return true;
  if (i > j) std::swap(i, j);
  return n.base[L.eq(i, j)];
}

bool base_leq(const TypeNode& n, const Layout& L, int i, int j) {
  if (base_eq(n, L, i, j)) return true;
  if (i < j) return n.base[L.leq(i, j)];
  return !n.base[L.leq(j, i)];
}

// odometer over [k]^a
template <class F>
void for_tuples(int k, int a, F&& f) {
  std::vector<int> t(a, 0);
  if (a > 0 && k == 0) return;
  for (;;) {
    f(t.data());
    int i = a - 1;
    while (i >= 0 && ++t[i] == k) t[i--] = 0;
    if (i < 0) return;
  }
}

// ------------------------------------------------------------------ unravelling

struct Unraveler {
  Logic logic;
  int ctx;
  const Structure& A;
  std::vector<int> rank;
  std::unordered_map<std::string, TypeId> memo;

  TypeId go(int q, std::vector<int>& el, std::vector<uint64_t>& sets) {
    std::string key;
    put_int(key, q);
    for (int e : el) put_int(key, e);
    put_int(key, -1);
    for (auto s : sets) key.append(reinterpret_cast<const char*>(&s), sizeof s);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    budget::check();

    int k = static_cast<int>(el.size()), m = static_cast<int>(sets.size());
    const Layout& L = layout(ctx, k, m);
    TypeNode n;
    n.ctx = ctx;
    n.q = q;
    n.k = k;
    n.m = m;
    n.base.assign(L.size, 0);
    Tuple t;
    for (int s = 0; s < A.sig.size(); ++s)
      for_tuples(k, L.ar[s], [&](const int* args) {
        t.assign(L.ar[s], 0);
        for (int i = 0; i < L.ar[s]; ++i) t[i] = el[args[i]];
        n.base[L.rel(s, args)] = A.holds(s, t);
      });
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        n.base[L.eq(i, j)] = el[i] == el[j];
        if (L.ordered) n.base[L.leq(i, j)] = rank[el[i]] <= rank[el[j]];
      }
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < k; ++i) n.base[L.mem(j, i)] = (sets[j] >> el[i]) & 1;
    if (q > 0) {
      for (int b = 0; b < A.n; ++b) {
        el.push_back(b);
        n.elem.push_back(go(q - 1, el, sets));
        el.pop_back();
      }
      if (logic == Logic::MSO) {
        uint64_t lim = uint64_t{1} << A.n;
        for (uint64_t Y = 0; Y < lim; ++Y) {
          sets.push_back(Y);
          n.sets.push_back(go(q - 1, el, sets));
          sets.pop_back();
        }
      }
    }
    TypeId id = intern(std::move(n));
    memo.emplace(std::move(key), id);
    return id;
  }
};

Logic type_logic(Logic L) {
  if (L == Logic::FO || L == Logic::MSO) return L;
  throw InputError("types exist for FO and MSO only");
}

// ------------------------------------------------------------------ truncate

std::unordered_map<uint64_t, TypeId> g_trunc;

TypeId trunc_rec(TypeId t, int q) {
  const TypeNode& n0 = store().nodes[t];
  if (q == n0.q) return t;
  if (q > n0.q) throw InputError("truncate_type: rank exceeds the type's rank");
  uint64_t key = static_cast<uint64_t>(t) << 8 | static_cast<uint64_t>(q);
  auto it = g_trunc.find(key);
  if (it != g_trunc.end()) return it->second;
  TypeNode n;
  n.ctx = n0.ctx;
  n.q = q;
  n.k = n0.k;
  n.m = n0.m;
  n.base = n0.base;
  if (q > 0) {
    auto elem = n0.elem;
    auto sets = n0.sets;
    for (auto c : elem) n.elem.push_back(trunc_rec(c, q - 1));
    for (auto c : sets) n.sets.push_back(trunc_rec(c, q - 1));
  }
  TypeId id = intern(std::move(n));
  g_trunc.emplace(key, id);
  return id;
}

// ------------------------------------------------------------------ compose

struct Key3 {
  int64_t a, b;
  uint64_t c;
  bool operator==(const Key3& o) const { return a == o.a && b == o.b && c == o.c; }
};
struct Key3Hash {
  size_t operator()(const Key3& k) const {
    uint64_t h = hash_mix(hash_mix(1469598103934665603ull, static_cast<uint64_t>(k.a)), static_cast<uint64_t>(k.b));
    return hash_mix(h, k.c);
  }
};

std::unordered_map<Key3, TypeId, Key3Hash> g_compose;

// pattern bit i set: parameter i comes from b. c = pattern | k << 56
TypeId compose_rec(TypeId a, TypeId b, uint64_t pat) {
  Key3 key{a, b, pat};
  auto it = g_compose.find(key);
  if (it != g_compose.end()) return it->second;
  budget::check();
  const TypeNode& A = store().nodes[a];
  const TypeNode& B = store().nodes[b];
  int q = A.q, m = A.m, k = A.k + B.k;
  int ctx = A.ctx;
  std::vector<int> side(k), local(k);
  int ia = 0, ib = 0;
  for (int i = 0; i < k; ++i) {
    side[i] = (pat >> i) & 1;
    local[i] = side[i] ? ib++ : ia++;
  }
  const Layout& L = layout(ctx, k, m);
  const Layout& LA = layout(ctx, A.k, m);
  const Layout& LB = layout(ctx, B.k, m);
  TypeNode n;
  n.ctx = ctx;
  n.q = q;
  n.k = k;
  n.m = m;
  n.base.assign(L.size, 0);
  std::vector<int> loc;
  for (size_t s = 0; s < L.ar.size(); ++s) {
    int a_ = L.ar[s];
    loc.resize(a_);
    for_tuples(k, a_, [&](const int* args) {
      int sd = side[args[0]];
      for (int i = 0; i < a_; ++i) {
        if (side[args[i]] != sd) return;
        loc[i] = local[args[i]];
      }
      const TypeNode& S = sd ? B : A;
      const Layout& LS = sd ? LB : LA;
      n.base[L.rel(static_cast<int>(s), args)] = S.base[LS.rel(static_cast<int>(s), loc.data())];
    });
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      if (side[i] == side[j]) {
        const TypeNode& S = side[i] ? B : A;
        const Layout& LS = side[i] ? LB : LA;
        n.base[L.eq(i, j)] = base_eq(S, LS, local[i], local[j]);
        if (L.ordered) n.base[L.leq(i, j)] = base_leq(S, LS, local[i], local[j]);
      } else if (L.ordered) {
        n.base[L.leq(i, j)] = side[i] == 0;  // everything in a precedes b
      }
    }
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) {
      const TypeNode& S = side[i] ? B : A;
      const Layout& LS = side[i] ? LB : LA;
      n.base[L.mem(j, i)] = S.base[LS.mem(j, local[i])];
    }
  if (q > 0) {
    if (k >= 63) throw BudgetError("compose: too many parameters");
    // copy: recursion may grow the node vector
    auto aelem = A.elem, belem = B.elem, asets = A.sets, bsets = B.sets;
    TypeId at = trunc_rec(a, q - 1), bt = trunc_rec(b, q - 1);
    for (auto c : aelem) n.elem.push_back(compose_rec(c, bt, pat));
    for (auto c : belem) n.elem.push_back(compose_rec(at, c, pat | uint64_t{1} << k));
    for (auto ca : asets)
      for (auto cb : bsets) n.sets.push_back(compose_rec(ca, cb, pat));
  }
  TypeId id = intern(std::move(n));
  g_compose.emplace(key, id);
  return id;
}

// ------------------------------------------------------------------ add root

struct RootCtx {
  int out_ctx;
  const Signature* sig;
  AtomicType alpha;
  std::vector<std::vector<int>> sub_symbol;  // [s][mask of non-r positions] -> symbol in expand(sig)
};

std::unordered_map<Key3, TypeId, Key3Hash> g_root;

// pat bit i: output parameter i is the root. mask bit j: root in X_j.
TypeId root_rec(const RootCtx& R, int64_t alpha_id, TypeId th, uint64_t pat, uint64_t mask) {
  Key3 key{alpha_id << 32 | th, static_cast<int64_t>(mask), pat};
  auto it = g_root.find(key);
  if (it != g_root.end()) return it->second;
  budget::check();
  const TypeNode& T = store().nodes[th];
  int q = T.q, m = T.m;
  int k = T.k + std::popcount(pat);
  const Layout& L = layout(R.out_ctx, k, m);
  const Layout& LT = layout(T.ctx, T.k, m);
  std::vector<int> local(k, -1);
  int it_ = 0;
  for (int i = 0; i < k; ++i)
    if (!((pat >> i) & 1)) local[i] = it_++;
  TypeNode n;
  n.ctx = R.out_ctx;
  n.q = q;
  n.k = k;
  n.m = m;
  n.base.assign(L.size, 0);
  std::vector<int> loc;
  for (size_t s = 0; s < L.ar.size(); ++s) {
    int a_ = L.ar[s];
    bool in_alpha = R.alpha.count(R.sig->symbols()[s].name) > 0;
    for_tuples(k, a_, [&](const int* args) {
      int msk = 0;
      loc.clear();
      for (int i = 0; i < a_; ++i)
        if (local[args[i]] >= 0) {
          msk |= 1 << i;
          loc.push_back(local[args[i]]);
        }
      bool v;
      if (msk == 0)
        v = in_alpha;
      else
        v = T.base[LT.rel(R.sub_symbol[s][msk], loc.data())];
      n.base[L.rel(static_cast<int>(s), args)] = v;
    });
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      bool ri = local[i] < 0, rj = local[j] < 0;
      if (ri || rj) {
        n.base[L.eq(i, j)] = ri && rj;
        if (L.ordered) n.base[L.leq(i, j)] = ri;  // the root is the minimum
      } else {
        n.base[L.eq(i, j)] = base_eq(T, LT, local[i], local[j]);
        if (L.ordered) n.base[L.leq(i, j)] = base_leq(T, LT, local[i], local[j]);
      }
    }
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i)
      n.base[L.mem(j, i)] = local[i] < 0 ? (mask >> j) & 1 : T.base[LT.mem(j, local[i])];
  if (q > 0) {
    if (k >= 63 || m >= 63) throw BudgetError("add_root: too many parameters");
    auto elem = T.elem, sets = T.sets;
    TypeId tt = trunc_rec(th, q - 1);
    n.elem.push_back(root_rec(R, alpha_id, tt, pat | uint64_t{1} << k, mask));
    for (auto c : elem) n.elem.push_back(root_rec(R, alpha_id, c, pat, mask));
    for (auto c : sets) {
      n.sets.push_back(root_rec(R, alpha_id, c, pat, mask));
      n.sets.push_back(root_rec(R, alpha_id, c, pat, mask | uint64_t{1} << m));
    }
  }
  TypeId id = intern(std::move(n));
  g_root.emplace(key, id);
  return id;
}

// ------------------------------------------------------------------ compare

std::unordered_map<uint64_t, int> g_cmp;
std::unordered_map<TypeId, std::vector<TypeId>> g_sorted_elem, g_sorted_sets;

int cmp_rec(TypeId a, TypeId b);

const std::vector<TypeId>& sorted_children(TypeId t, bool sets) {
  auto& cache = sets ? g_sorted_sets : g_sorted_elem;
  auto it = cache.find(t);
  if (it != cache.end()) return it->second;
  auto v = sets ? store().nodes[t].sets : store().nodes[t].elem;
  std::sort(v.begin(), v.end(), [](TypeId x, TypeId y) { return cmp_rec(x, y) < 0; });
  return cache.emplace(t, std::move(v)).first->second;
}

int cmp_seq(const std::vector<TypeId>& x, const std::vector<TypeId>& y) {
  size_t n = std::min(x.size(), y.size());
  for (size_t i = 0; i < n; ++i) {
    int c = cmp_rec(x[i], y[i]);
    if (c) return c;
  }
  return x.size() < y.size() ? -1 : x.size() > y.size() ? 1 : 0;
}

int cmp_rec(TypeId a, TypeId b) {
  if (a == b) return 0;
  uint64_t key = static_cast<uint64_t>(std::min(a, b)) << 32 | static_cast<uint32_t>(std::max(a, b));
  auto it = g_cmp.find(key);
  if (it != g_cmp.end()) return a < b ? it->second : -it->second;
  const TypeNode& A = store().nodes[a];
  const TypeNode& B = store().nodes[b];
  int c = 0;
  if (A.q != B.q) c = A.q < B.q ? -1 : 1;
  else if (A.k != B.k) c = A.k < B.k ? -1 : 1;
  else if (A.m != B.m) c = A.m < B.m ? -1 : 1;
  else if (A.base != B.base) c = A.base < B.base ? -1 : 1;
  else {
    c = cmp_seq(sorted_children(a, false), sorted_children(b, false));
    if (!c) c = cmp_seq(sorted_children(a, true), sorted_children(b, true));
    if (!c) throw std::logic_error("type_compare: distinct ids with equal structure");
  }
  int stored = a < b ? c : -c;
  g_cmp.emplace(key, stored);
  return c;
}

// ------------------------------------------------------------------ eval on type

struct TypeEval {
  const TypeCtx& C;
  std::map<std::tuple<const Node*, TypeId, std::string>, bool> memo;

  int param(const std::map<std::string, int>& env, const std::string& v) {
    auto it = env.find(v);
    if (it == env.end()) throw InputError("eval_on_type: unbound variable " + v);
    return it->second;
  }

  bool go(const Node* f, TypeId t, std::map<std::string, int>& fo, std::map<std::string, int>& so) {
    const TypeNode& n = store().nodes[t];
    const Layout& L = layout(n.ctx, n.k, n.m);
    switch (f->kind) {
      case Kind::True:
        return true;
      case Kind::False:
        return false;
      case Kind::Atom: {
        int s = C.sig.index(f->name);
        if (s < 0) throw InputError("eval_on_type: unknown relation " + f->name);
        if (static_cast<int>(f->args.size()) != L.ar[s]) throw InputError("eval_on_type: arity mismatch at " + f->name);
        std::vector<int> args;
        for (auto& v : f->args) args.push_back(param(fo, v));
        return n.base[L.rel(s, args.data())];
      }
      case Kind::Eq:
        return base_eq(n, L, param(fo, f->args[0]), param(fo, f->args[1]));
      case Kind::Leq:
        if (!C.ordered) throw InputError("eval_on_type: <= over an unordered type");
        return base_leq(n, L, param(fo, f->args[0]), param(fo, f->args[1]));
      case Kind::SetAtom:
        return n.base[L.mem(param(so, f->name), param(fo, f->args[0]))];
      case Kind::Not:
        return !go(f->kids[0].get(), t, fo, so);
      case Kind::And:
        for (auto& c : f->kids)
          if (!go(c.get(), t, fo, so)) return false;
        return true;
      case Kind::Or:
        for (auto& c : f->kids)
          if (go(c.get(), t, fo, so)) return true;
        return false;
      case Kind::Implies:
        return !go(f->kids[0].get(), t, fo, so) || go(f->kids[1].get(), t, fo, so);
      case Kind::ExistsMod:
        throw DomainError("eval_on_type: modulo quantifiers are not decided by types");
      default:
        break;
    }
    // quantifiers
    if (n.q == 0) throw DomainError("eval_on_type: quantifier rank exceeds the type's rank");
    bool set = f->kind == Kind::ExistsSet || f->kind == Kind::ForallSet;
    if (set && C.logic != Logic::MSO) throw DomainError("eval_on_type: set quantifier over an FO type");
    std::string envkey;
    for (auto& [k, v] : fo) envkey += k + "=" + std::to_string(v) + ",";
    envkey += ";";
    for (auto& [k, v] : so) envkey += k + "=" + std::to_string(v) + ",";
    auto mk = std::make_tuple(f, t, envkey);
    auto hit = memo.find(mk);
    if (hit != memo.end()) return hit->second;
    bool want = f->kind == Kind::Exists || f->kind == Kind::ExistsSet;
    auto& env = set ? so : fo;
    auto old = env.find(f->name);
    std::optional<int> saved;
    if (old != env.end()) saved = old->second;
    env[f->name] = set ? n.m : n.k;
    bool res = !want;
    auto kids = set ? n.sets : n.elem;
    for (auto c : kids)
      if (go(f->kids[0].get(), c, fo, so) == want) {
        res = want;
        break;
      }
    if (saved)
      env[f->name] = *saved;
    else
      env.erase(f->name);
    memo.emplace(mk, res);
    return res;
  }
};

}  // namespace

// ------------------------------------------------------------------ public

int type_ctx(const Signature& sig, bool ordered, Logic L) {
  Lock lk(g_mu);
  L = type_logic(L);
  auto& S = store();
  std::string key = ctx_key(sig, ordered, L);
  auto it = S.ctx_index.find(key);
  if (it != S.ctx_index.end()) return it->second;
  if (sig.contains("<=")) throw InputError("type contexts carry the order separately; drop <= from the signature");
  int id = static_cast<int>(S.ctxs.size());
  S.ctxs.push_back(TypeCtx{sig, ordered, L});
  S.ctx_hash.push_back(fnv1a(key));
  S.ctx_index.emplace(key, id);
  return id;
}

const TypeCtx& type_ctx_info(int ctx) {
  Lock lk(g_mu);
  return store().ctxs.at(ctx);
}

const TypeNode& type_node(TypeId t) {
  Lock lk(g_mu);
  return store().nodes.at(t);
}

int type_q(TypeId t) { return type_node(t).q; }

std::string type_hash(TypeId t) { return hex64(type_node(t).hash); }

size_t type_store_size() {
  Lock lk(g_mu);
  return store().nodes.size();
}

TypeId tp(Logic L, int q, const Structure& A, const std::vector<int>& elems, const std::vector<uint64_t>& sets) {
  Lock lk(g_mu);
  L = type_logic(L);
  if (q < 0) throw InputError("tp: negative rank");
  if (!sets.empty() && L != Logic::MSO) throw InputError("tp: set parameters need MSO");
  for (int e : elems)
    if (e < 0 || e >= A.n) throw InputError("tp: parameter out of range");
  if (L == Logic::MSO && q > 0 && A.n > 20) throw BudgetError("tp: MSO unravelling over more than 20 elements");
  int ctx = type_ctx(A.sig, A.ordered(), L);
  Unraveler U{L, ctx, A, A.ordered() ? A.order_rank() : std::vector<int>{}, {}};
  std::vector<int> el = elems;
  std::vector<uint64_t> st = sets;
  return U.go(q, el, st);
}

TypeId empty_type(int ctx, int q) {
  Lock lk(g_mu);
  const TypeCtx& C = store().ctxs.at(ctx);
  Structure E(C.sig, 0);
  if (C.ordered) E.order = std::vector<int>{};
  return tp(C.logic, q, E);
}

TypeId truncate_type(TypeId t, int q) {
  Lock lk(g_mu);
  return trunc_rec(t, q);
}

TypeId compose(TypeId a, TypeId b) {
  Lock lk(g_mu);
  const TypeNode& A = store().nodes.at(a);
  const TypeNode& B = store().nodes.at(b);
  if (A.ctx != B.ctx || A.q != B.q) throw InputError("compose: types from different contexts or ranks");
  if (A.k || A.m || B.k || B.m) throw InputError("compose: parameter-free types only");
  return compose_rec(a, b, 0);
}

TypeId compose_power(TypeId a, int n) {
  Lock lk(g_mu);
  if (n < 0) throw InputError("compose_power: negative exponent");
  const TypeNode& A = store().nodes.at(a);
  if (n == 0) return empty_type(A.ctx, A.q);
  TypeId r = a;
  for (int i = 1; i < n; ++i) r = compose(r, a);
  return r;
}

TypeId add_root_type(const Signature& sig, const AtomicType& alpha, TypeId theta) {
  Lock lk(g_mu);
  const TypeNode& T = store().nodes.at(theta);
  const TypeCtx C = store().ctxs[T.ctx];
  Signature ex = sig.expand();
  if (!(C.sig == ex)) throw InputError("add_root_type: theta is not over the expanded signature");
  if (T.k || T.m) throw InputError("add_root_type: parameter-free types only");
  for (auto& a : alpha)
    if (!sig.contains(a)) throw InputError("add_root_type: atomic type mentions unknown symbol " + a);
  static std::vector<std::unique_ptr<RootCtx>> ctxs;
  static std::map<std::pair<int, std::string>, int64_t> ids;
  int out = type_ctx(sig, C.ordered, C.logic);
  auto key = std::make_pair(out, atomic_type_str(alpha));
  auto it = ids.find(key);
  int64_t aid;
  if (it == ids.end()) {
    auto R = std::make_unique<RootCtx>();
    R->out_ctx = out;
    R->sig = &store().ctxs[out].sig;
    R->alpha = alpha;
    for (auto& s : sig.symbols()) {
      std::vector<int> sub(1 << s.arity, -1);
      for (int msk = 1; msk < (1 << s.arity); ++msk) {
        std::vector<int> idx;
        for (int i = 0; i < s.arity; ++i)
          if (msk >> i & 1) idx.push_back(i + 1);
        sub[msk] = ex.index(expanded_name(s.name, idx));
      }
      R->sub_symbol.push_back(sub);
    }
    aid = static_cast<int64_t>(ctxs.size());
    ctxs.push_back(std::move(R));
    ids.emplace(key, aid);
  } else {
    aid = it->second;
  }
  return root_rec(*ctxs[aid], aid, theta, 0, 0);
}

TypeId tp_by_components(Logic L, int q, const Structure& A) {
  Lock lk(g_mu);
  int ctx = type_ctx(A.sig, A.ordered(), L);
  auto comps = components(A);
  if (A.ordered()) {
    auto rank = A.order_rank();
    auto first = [&](const SubStructure& c) { return rank[c.to_parent[c.s.order->front()]]; };
    std::sort(comps.begin(), comps.end(),
              [&](const SubStructure& x, const SubStructure& y) { return first(x) < first(y); });
    int pos = 0;
    for (auto& c : comps)
      for (int e : *c.s.order)
        if (rank[c.to_parent[e]] != pos++) throw DomainError("tp_by_components: order is not component ordered");
  }
  TypeId r = empty_type(ctx, q);
  for (auto& c : comps) r = compose(r, tp(L, q, c.s));
  return r;
}

TypeId tp_recursive(Logic L, int q, const Structure& A) {
  Lock lk(g_mu);
  if (A.ordered()) throw InputError("tp_recursive: unordered structures only");
  static std::map<std::tuple<int, int, std::string>, TypeId> cache;
  int ctx = type_ctx(A.sig, false, L);
  if (A.n <= 1) return tp(L, q, A);
  auto comps = components(A);
  if (comps.size() > 1) {
    TypeId r = empty_type(ctx, q);
    for (auto& c : comps) r = compose(r, tp_recursive(L, q, c.s));
    return r;
  }
  auto key = std::make_tuple(ctx, q, canonical_form(A));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  int r = roots_of(A).front();
  auto B = remove_and_expand(A, r);
  TypeId th = tp_recursive(L, q, B.s);
  TypeId res = add_root_type(A.sig, atomic_type(A, r), th);
  cache.emplace(key, res);
  return res;
}

int type_compare(TypeId a, TypeId b) {
  Lock lk(g_mu);
  const TypeNode& A = store().nodes.at(a);
  const TypeNode& B = store().nodes.at(b);
  if (A.ctx != B.ctx) throw InputError("type_compare: types from different contexts");
  return cmp_rec(a, b);
}

int atomic_compare(const AtomicType& a, const AtomicType& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a == b) return 0;
  return a < b ? -1 : 1;  // std::set iterates names in sorted order
}

bool eval_on_type(const Formula& phi, TypeId t) {
  Lock lk(g_mu);
  const TypeNode& n = store().nodes.at(t);
  if (n.k || n.m) throw InputError("eval_on_type: parameter-free types only");
  if (!free_vars(phi).empty() || !free_set_vars(phi).empty()) throw InputError("eval_on_type: sentence expected");
  if (quantifier_rank(phi) > n.q) throw DomainError("eval_on_type: qr(phi) exceeds the type's rank");
  TypeEval E{store().ctxs[n.ctx], {}};
  std::map<std::string, int> fo, so;
  return E.go(phi.get(), t, fo, so);
}

int stabilization_threshold(TypeId t, int max_n) {
  Lock lk(g_mu);
  TypeId cur = t;
  for (int n = 1; n <= max_n; ++n) {
    TypeId next = compose(cur, t);
    if (next == cur) return n;
    cur = next;
  }
  throw BudgetError("stabilization_threshold: no stabilization up to " + std::to_string(max_n));
}

int pumping_period(const std::vector<TypeId>& types, int max_p) {
  Lock lk(g_mu);
  std::vector<std::vector<TypeId>> pw(types.size());
  auto power = [&](size_t i, int e) {
    auto& v = pw[i];
    if (v.empty()) v.push_back(types[i]);
    while (static_cast<int>(v.size()) < e) v.push_back(compose(v.back(), types[i]));
    return v[e - 1];
  };
  for (int p = 1; p <= max_p; ++p) {
    bool ok = true;
    for (size_t i = 0; i < types.size() && ok; ++i) ok = power(i, p) == power(i, 2 * p);
    if (ok) return p;
  }
  throw BudgetError("pumping_period: no period up to " + std::to_string(max_p));
}

SemigroupClosure compose_closure(const std::vector<TypeId>& generators, size_t max_size) {
  Lock lk(g_mu);
  std::set<TypeId> seen(generators.begin(), generators.end());
  std::vector<TypeId> queue(seen.begin(), seen.end());
  SemigroupClosure out;
  out.closed = true;
  for (size_t i = 0; i < queue.size(); ++i) {
    for (auto g : generators) {
      TypeId c = compose(queue[i], g);
      if (seen.insert(c).second) {
        queue.push_back(c);
        if (seen.size() > max_size) {
          out.closed = false;
          break;
        }
      }
    }
    if (!out.closed) break;
  }
  out.elements.assign(seen.begin(), seen.end());
  std::sort(out.elements.begin(), out.elements.end(), TypeLess{});
  return out;
}

// ------------------------------------------------------------------ shrinking

namespace {

std::vector<int> shrink_rec(const Structure& A, Logic L, int q) {
  std::vector<int> keep;
  if (A.n <= 1) {
    for (int i = 0; i < A.n; ++i) keep.push_back(i);
    return keep;
  }
  auto comps = components(A);
  if (comps.size() == 1) {
    int r = roots_of(A).front();
    auto B = remove_and_expand(A, r);
    keep.push_back(r);
    for (int b : shrink_rec(B.s, L, q)) keep.push_back(B.to_parent[b]);
    std::sort(keep.begin(), keep.end());
    return keep;
  }
  std::vector<std::pair<TypeId, std::vector<const SubStructure*>>> groups;
  for (auto& c : comps) {
    TypeId t = tp_recursive(L, q, c.s);
    auto it = std::find_if(groups.begin(), groups.end(), [&](auto& g) { return g.first == t; });
    if (it == groups.end()) {
      groups.push_back({t, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(&c);
  }
  for (auto& [t, cs] : groups) {
    size_t lim = static_cast<size_t>(stabilization_threshold(t));
    for (size_t i = 0; i < cs.size() && i < lim; ++i)
      for (int b : shrink_rec(cs[i]->s, L, q)) keep.push_back(cs[i]->to_parent[b]);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace

SubStructure shrink_model(const Structure& A, Logic L, int q) {
  Lock lk(g_mu);
  type_logic(L);
  if (A.ordered()) throw InputError("shrink_model: unordered structures only");
  return induced(A, shrink_rec(A, L, q));
}

}  // namespace tdl
