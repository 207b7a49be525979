#include "tdl/lowerbound.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace tdl {

Signature lower_sig() { return Signature({{"E", 2}, {"R", 1}, {"B", 1}}); }

std::vector<int> forest_parents(const Structure& F) {
  int e = F.sig.index("E");
  if (e < 0 || F.sig[e].arity != 2) throw InputError("forest: binary E expected");
  std::vector<int> par(F.n, -1);
  for (auto& t : F.rel[e]) {
    if (t[0] == t[1]) throw InputError("forest: loop at " + std::to_string(t[0]));
    if (par[t[1]] >= 0) throw InputError("forest: node " + std::to_string(t[1]) + " has two parents");
    par[t[1]] = t[0];
  }
  // no cycles: every node reaches a root
  for (int v = 0; v < F.n; ++v) {
    int u = v, steps = 0;
    while (par[u] >= 0) {
      u = par[u];
      if (++steps > F.n) throw InputError("forest: cycle through " + std::to_string(v));
    }
  }
  return par;
}

std::vector<int> forest_roots(const Structure& F) {
  auto par = forest_parents(F);
  std::vector<int> r;
  for (int v = 0; v < F.n; ++v)
    if (par[v] < 0) r.push_back(v);
  return r;
}

int forest_height(const Structure& F) {
  auto par = forest_parents(F);
  int h = 0;
  for (int v = 0; v < F.n; ++v) {
    int k = 1;
    for (int u = v; par[u] >= 0; u = par[u]) ++k;
    h = std::max(h, k);
  }
  return h;
}

namespace {

std::vector<std::vector<int>> children(const Structure& F) {
  auto par = forest_parents(F);
  std::vector<std::vector<int>> ch(F.n);
  for (int v = 0; v < F.n; ++v)
    if (par[v] >= 0) ch[par[v]].push_back(v);
  return ch;
}

// grows a tree from nested child lists
struct Builder {
  Structure T{lower_sig(), 0};
  std::vector<std::pair<int, int>> edges;
  int node() { return T.n++; }
  Structure finish(Colour c) {
    Structure out(lower_sig(), T.n);
    for (auto [a, b] : edges) out.add(0, {a, b});
    for (int v = 0; v < T.n; ++v) out.add(c == Colour::Red ? 1 : 2, {v});
    return out;
  }
};

int enc_into(Builder& b, uint64_t n) {
  int r = b.node();
  for (int i = 0; i < 64; ++i)
    if (n >> i & 1) {
      int c = enc_into(b, static_cast<uint64_t>(i));
      b.edges.push_back({r, c});
    }
  return r;
}

// canonical key of the num-reduced subtree below v
std::string num_key(const std::vector<std::vector<int>>& ch, int v, std::map<int, std::string>& memo) {
  auto it = memo.find(v);
  if (it != memo.end()) return it->second;
  std::vector<std::string> ks;
  for (int c : ch[v]) ks.push_back(num_key(ch, c, memo));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::string k = "(";
  for (auto& s : ks) k += s;
  k += ")";
  return memo[v] = k;
}

int build_from_key(Builder& b, const std::string& k, size_t& pos) {
  // k[pos] == '('
  int r = b.node();
  ++pos;
  while (k[pos] == '(') {
    int c = build_from_key(b, k, pos);
    b.edges.push_back({r, c});
  }
  ++pos;  // ')'
  return r;
}

Colour root_colour(const Structure& T, int r) {
  int blue = T.sig.index("B");
  return blue >= 0 && T.holds(blue, {r}) ? Colour::Blue : Colour::Red;
}

int single_root(const Structure& T, const char* what) {
  auto roots = forest_roots(T);
  if (roots.size() != 1) throw InputError(std::string(what) + ": a tree expected");
  return roots[0];
}

}  // namespace

Structure enc(uint64_t n, Colour c) {
  Builder b;
  enc_into(b, n);
  return b.finish(c);
}

Structure subtree(const Structure& F, int v) {
  auto ch = children(F);
  std::vector<int> elems{v};
  for (size_t i = 0; i < elems.size(); ++i)
    for (int c : ch[elems[i]]) elems.push_back(c);
  return induced(F, elems).s;
}

Structure num(const Structure& T) {
  int r = single_root(T, "num");
  auto ch = children(T);
  std::map<int, std::string> memo;
  std::string k = num_key(ch, r, memo);
  Builder b;
  size_t pos = 0;
  build_from_key(b, k, pos);
  return b.finish(root_colour(T, r));
}

uint64_t decode(const Structure& T) {
  int r = single_root(T, "decode");
  auto ch = children(T);
  std::map<int, std::string> memo;
  std::function<uint64_t(int)> go = [&](int v) -> uint64_t {
    std::vector<std::string> ks;
    for (int c : ch[v]) ks.push_back(num_key(ch, c, memo));
    std::sort(ks.begin(), ks.end());
    if (std::adjacent_find(ks.begin(), ks.end()) != ks.end())
      throw DomainError("decode: isomorphic sibling subtrees, not a number encoding");
    uint64_t n = 0;
    for (int c : ch[v]) {
      uint64_t i = go(c);
      if (i >= 64) throw DomainError("decode: value exceeds 64 bits");
      n |= uint64_t{1} << i;
    }
    return n;
  };
  return go(r);
}

uint64_t tower(int d) {
  if (d < 0) throw InputError("tower: negative d");
  if (d > 5) throw DomainError("tower(" + std::to_string(d) + ") does not fit in 64 bits");
  uint64_t t = 0;
  for (int i = 0; i < d; ++i) t = uint64_t{1} << t;
  return t;
}

namespace {

Formula eq_rec(int d, const std::string& x, const std::string& y, Fresh& fresh, EqVariant v) {
  if (d <= 1) return f_true();
  std::string u = fresh.var(), w = fresh.var();
  if (v == EqVariant::Naive) {
    auto half = [&](const std::string& a, const std::string& b) {
      return forall(u, implies(atom("E", {a, u}), exists(w, conj(atom("E", {b, w}), eq_rec(d - 1, u, w, fresh, v)))));
    };
    Formula l = half(x, y);
    Formula r = half(y, x);
    return conj(l, r);
  }
  // both directions through one recursive call
  std::string a = fresh.var(), b = fresh.var();
  Formula pick = disj(conj(eq(a, x), eq(b, y)), conj(eq(a, y), eq(b, x)));
  Formula step =
      forall(u, implies(atom("E", {a, u}), exists(w, conj(atom("E", {b, w}), eq_rec(d - 1, u, w, fresh, v)))));
  return forall(a, forall(b, implies(pick, step)));
}

}  // namespace

Formula build_eq(int d, const std::string& x, const std::string& y, Fresh& fresh, EqVariant variant) {
  if (d < 1) throw InputError("eq_d needs d >= 1");
  return eq_rec(d, x, y, fresh, variant);
}

Formula build_root_in(const std::string& x, const std::string& M, Fresh& fresh) {
  std::string z = fresh.var();
  return conj(set_atom(M, x), neg(exists(z, conj(set_atom(M, z), atom("E", {z, x})))));
}

Formula build_conn(const std::string& M, Fresh& fresh) {
  // one M-root per tree: no two distinct M-roots lie in a common E-closed set
  std::string x = fresh.var(), y = fresh.var(), u = fresh.var(), v = fresh.var(), X = fresh.set_var();
  Formula closed = forall(u, forall(v, implies(atom("E", {u, v}), conj(implies(set_atom(X, u), set_atom(X, v)),
                                                                        implies(set_atom(X, v), set_atom(X, u))))));
  Formula same = forall_set(X, implies(conj(set_atom(X, x), closed), set_atom(X, y)));
  Formula body = conj({neq(x, y), build_root_in(x, M, fresh), build_root_in(y, M, fresh), same});
  return neg(exists(x, exists(y, body)));
}

Formula build_phi_lower(int d, EqVariant variant) {
  if (d < 1) throw InputError("phi_d needs d >= 1");
  Fresh fresh;
  std::string M = "M", x = "x", y = "y", z = fresh.var();
  Formula eqd = relativise(build_eq(d, x, y, fresh, variant), set_atom(M, z), z, fresh);
  Formula match = exists(y, conj({build_root_in(y, M, fresh), atom("B", {y}), eqd}));
  Formula red_in = forall(x, implies(atom("R", {x}), set_atom(M, x)));
  Formula cover = forall(x, implies(conj(atom("R", {x}), build_root_in(x, M, fresh)), match));
  return exists_set(M, conj({build_conn(M, fresh), red_in, cover}));
}

Structure build_witness_tree(int d, int max_d) {
  if (d < 1) throw InputError("T_d needs d >= 1");
  if (d > max_d) throw BudgetError("T_" + std::to_string(d) + " exceeds the family budget d <= " + std::to_string(max_d));
  uint64_t k = std::max<uint64_t>(1, tower(d) - 1);
  Builder b;
  std::function<int(int)> grow = [&](int h) {
    int r = b.node();
    if (h > 1)
      for (uint64_t i = 0; i < k; ++i) {
        int c = grow(h - 1);
        b.edges.push_back({r, c});
      }
    return r;
  };
  grow(d);
  return b.finish(Colour::Blue);
}

Structure build_family(int d, int n, int max_d) {
  if (n < 0) throw InputError("F_d^n needs n >= 0");
  Structure T = build_witness_tree(d, max_d);
  Structure F(lower_sig(), 0);
  for (uint64_t i = 0; i < tower(d); ++i) F = disjoint_union(F, enc(i, Colour::Red));
  for (int i = 0; i < n; ++i) F = disjoint_union(F, T);
  return F;
}

bool embeds_at_root(const Structure& P, const Structure& T) {
  auto cp = children(P), ct = children(T);
  int rp = single_root(P, "embed"), rt = single_root(T, "embed");
  std::function<bool(int, int)> fits = [&](int p, int t) {
    auto& a = cp[p];
    auto& b = ct[t];
    if (a.size() > b.size()) return false;
    std::vector<char> used(b.size(), 0);
    std::function<bool(size_t)> assign = [&](size_t i) {
      if (i == a.size()) return true;
      for (size_t j = 0; j < b.size(); ++j) {
        if (used[j] || !fits(a[i], b[j])) continue;
        used[j] = 1;
        if (assign(i + 1)) return true;
        used[j] = 0;
      }
      return false;
    };
    return assign(0);
  };
  return fits(rp, rt);
}

}  // namespace tdl
