#include "tdl/fodecomp.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "tdl/builders.hpp"
#include "tdl/eval.hpp"
#include "tdl/treedepth.hpp"

namespace tdl {

DecompFormulas build_decomp_formulas(const Signature& sig, int d, LevelReading reading) {
  if (d < 1) throw InputError("decomposition formulas need d >= 1");
  Fresh fresh;
  DecompFormulas F;
  F.d = d;
  F.reading = reading;
  F.phi.assign(d + 1, f_false());
  F.psi.assign(d + 1, f_true());
  const std::string x = "x", y = "y", z = "z";
  // below[i](z) = !phi_{<i}(z)
  std::vector<Formula> below(d + 2, f_true());
  auto psi_at = [&](int i, const std::string& a, const std::string& b) {
    return rename_free(F.psi[i], {{x, a}, {y, b}}, fresh);
  };
  for (int i = 1; i <= d; ++i) {
    // residual components after removing the levels < i; reach_{d-i+2}
    // covers components of td <= d-i+1 with room to spare
    Formula r = relativise(build_reach(sig, d - i + 2, x, y, fresh), below[i], z, fresh);
    F.psi[i] = i == 1 ? r
                      : conj({rename_free(below[i], {{z, x}}, fresh), rename_free(below[i], {{z, y}}, fresh), r});
    Formula g1 = below[i];
    if (reading == LevelReading::Component) g1 = conj(g1, psi_at(i, x, z));
    Formula g2 = conj(g1, neq(z, x));
    std::vector<Formula> alts;
    for (int j = 0; j <= d - i; ++j) {
      Formula whole = relativise(build_td_eq(sig, j + 1, fresh), g1, z, fresh);
      Formula rest = relativise(build_td_eq(sig, j, fresh), g2, z, fresh);
      alts.push_back(conj(whole, rest));
    }
    F.phi[i] = conj(rename_free(below[i], {{z, x}}, fresh), disj(alts));
    below[i + 1] = conj(below[i], neg(rename_free(F.phi[i], {{x, z}}, fresh)));
  }
  std::vector<Formula> e;
  for (int i = 1; i <= d; ++i)
    e.push_back(conj({F.phi[i], rename_free(F.phi[i], {{x, y}}, fresh), F.psi[i]}));
  F.eps = disj(e);
  std::vector<Formula> a;
  for (int i = 1; i < d; ++i) {
    std::string u = fresh.var(), v = fresh.var();
    Formula link = exists(u, exists(v, conj({build_gaifman_adjacency(sig, u, v, fresh),
                                             rename_free(F.eps, {{y, u}}, fresh), psi_at(i + 1, y, v)})));
    a.push_back(conj({F.phi[i], rename_free(F.phi[i + 1], {{x, y}}, fresh), link}));
  }
  F.alpha = disj(a);
  return F;
}

std::vector<int> TreeDecomposition::bag(int c) const {
  std::vector<int> out;
  for (int k = c; k >= 0; k = parent[k]) out.insert(out.end(), classes[k].begin(), classes[k].end());
  std::sort(out.begin(), out.end());
  return out;
}

int TreeDecomposition::height() const {
  int h = 0;
  for (int l : level) h = std::max(h, l);
  return h;
}

TreeDecomposition normalized(TreeDecomposition T) {
  size_t m = T.classes.size();
  for (auto& c : T.classes) std::sort(c.begin(), c.end());
  std::vector<int> idx(m);
  for (size_t i = 0; i < m; ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (T.level[a] != T.level[b]) return T.level[a] < T.level[b];
    return T.classes[a] < T.classes[b];
  });
  std::vector<int> newid(m);
  for (size_t i = 0; i < m; ++i) newid[idx[i]] = static_cast<int>(i);
  TreeDecomposition out;
  out.class_of = T.class_of;
  for (auto& c : out.class_of) c = newid[c];
  for (int k : idx) {
    out.classes.push_back(T.classes[k]);
    out.level.push_back(T.level[k]);
    out.parent.push_back(T.parent[k] < 0 ? -1 : newid[T.parent[k]]);
  }
  return out;
}

TreeDecomposition decompose_direct(const Structure& A, int d) {
  TreeDecomposition T;
  T.class_of.assign(A.n, -1);
  // residual components with the class they hang below
  std::vector<std::pair<std::vector<int>, int>> todo;
  for (auto& c : components(A)) todo.push_back({c.to_parent, -1});
  for (int lvl = 1; !todo.empty(); ++lvl) {
    if (lvl > d) throw DomainError("decompose: tree-depth exceeds " + std::to_string(d));
    std::vector<std::pair<std::vector<int>, int>> next;
    for (auto& [elems, par] : todo) {
      auto C = induced(A, elems);
      auto roots = roots_of(C.s);
      int k = static_cast<int>(T.classes.size());
      std::vector<int> cls;
      std::vector<char> is_root(C.s.n, 0);
      for (int r : roots) {
        cls.push_back(C.to_parent[r]);
        is_root[r] = 1;
        T.class_of[C.to_parent[r]] = k;
      }
      T.classes.push_back(cls);
      T.parent.push_back(par);
      T.level.push_back(lvl);
      std::vector<int> rest;
      for (int e = 0; e < C.s.n; ++e)
        if (!is_root[e]) rest.push_back(e);
      if (rest.empty()) continue;
      auto R = induced(C.s, rest);
      for (auto& c : components(R.s)) {
        std::vector<int> up;
        for (int e : c.to_parent) up.push_back(C.to_parent[R.to_parent[e]]);
        next.push_back({up, k});
      }
    }
    todo.swap(next);
  }
  return normalized(T);
}

namespace {

std::mutex cache_mu;

// building and compiling the d = 3 formulas takes seconds; keep them
const DecompFormulas& cached_formulas(const Signature& sig, int d, LevelReading reading) {
  static std::map<std::tuple<std::string, int, int>, DecompFormulas> cache;
  std::lock_guard<std::mutex> lk(cache_mu);
  auto key = std::make_tuple(sig.str(), d, static_cast<int>(reading));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_decomp_formulas(sig, d, reading)).first;
  return it->second;
}

const Evaluator& evaluator(const Formula& f) {
  static std::map<const Node*, std::pair<Formula, std::unique_ptr<Evaluator>>> cache;
  std::lock_guard<std::mutex> lk(cache_mu);
  auto& slot = cache[f.get()];
  if (!slot.second) slot = {f, std::make_unique<Evaluator>(f)};
  return *slot.second;
}

std::vector<std::vector<char>> pair_table(const Structure& A, const Formula& f) {
  std::vector<Env> envs;
  for (int a = 0; a < A.n; ++a)
    for (int b = 0; b < A.n; ++b) envs.push_back(Env{{{"x", a}, {"y", b}}, {}});
  auto r = evaluator(f).eval_batch(A, envs);
  std::vector<std::vector<char>> t(A.n, std::vector<char>(A.n, 0));
  for (int a = 0; a < A.n; ++a)
    for (int b = 0; b < A.n; ++b) t[a][b] = r[a * A.n + b];
  return t;
}

}  // namespace

TreeDecomposition decompose_formulas(const Structure& A, const DecompFormulas& F) {
  int n = A.n;
  auto E = pair_table(A, F.eps);
  for (int a = 0; a < n; ++a) {
    if (!E[a][a]) throw DomainError("eps: element " + std::to_string(a) + " is in no class");
    for (int b = 0; b < n; ++b) {
      if (E[a][b] != E[b][a]) throw DomainError("eps: not symmetric");
      for (int c = 0; c < n; ++c)
        if (E[a][b] && E[b][c] && !E[a][c]) throw DomainError("eps: not transitive");
    }
  }
  TreeDecomposition T;
  T.class_of.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    if (T.class_of[a] >= 0) continue;
    int k = static_cast<int>(T.classes.size());
    T.classes.push_back({});
    for (int b = 0; b < n; ++b)
      if (E[a][b]) {
        T.classes[k].push_back(b);
        T.class_of[b] = k;
      }
  }
  size_t m = T.classes.size();
  T.level.assign(m, 0);
  for (int i = 1; i <= F.d; ++i) {
    std::vector<Env> envs;
    for (size_t k = 0; k < m; ++k) envs.push_back(Env{{{"x", T.classes[k][0]}}, {}});
    auto r = evaluator(F.phi[i]).eval_batch(A, envs);
    for (size_t k = 0; k < m; ++k)
      if (r[k]) {
        if (T.level[k]) throw DomainError("phi: class on two levels");
        T.level[k] = i;
      }
  }
  for (size_t k = 0; k < m; ++k)
    if (!T.level[k]) throw DomainError("phi: class without a level");
  auto Al = pair_table(A, F.alpha);
  T.parent.assign(m, -1);
  for (size_t k = 0; k < m; ++k) {
    std::set<int> ps;
    for (int a = 0; a < n; ++a)
      if (Al[a][T.classes[k][0]]) ps.insert(T.class_of[a]);
    if (T.level[k] == 1 ? !ps.empty() : ps.size() != 1)
      throw DomainError("alpha: class " + std::to_string(k) + " has " + std::to_string(ps.size()) + " parents");
    if (!ps.empty()) T.parent[k] = *ps.begin();
  }
  return normalized(T);
}

Decomposition decompose(const Structure& A, int d, bool formula_path) {
  if (tree_depth(A) > d) throw DomainError("decompose: tree-depth exceeds " + std::to_string(d));
  Decomposition out;
  out.td = decompose_direct(A, d);
  if (formula_path) {
    auto G = decompose_formulas(A, cached_formulas(A.sig, d, LevelReading::Component));
    if (!(G == out.td)) throw std::logic_error("decompose: formula path and direct path disagree");
    out.formula_path = true;
  }
  return out;
}

DecompReport verify_decomposition(const Structure& A, const TreeDecomposition& T, int d, bool with_formulas) {
  DecompReport rep;
  auto fail = [&](std::string s) {
    rep.ok = false;
    rep.failures.push_back(std::move(s));
  };
  int n = A.n;
  size_t m = T.classes.size();
  if (T.class_of.size() != static_cast<size_t>(n) || T.parent.size() != m || T.level.size() != m) {
    fail("shape: inconsistent sizes");
    return rep;
  }
  // partition
  std::vector<int> seen(n, 0);
  for (size_t k = 0; k < m; ++k)
    for (int e : T.classes[k]) {
      if (e < 0 || e >= n || T.class_of[e] != static_cast<int>(k)) fail("partition: class_of mismatch at " + std::to_string(e));
      else ++seen[e];
    }
  for (int e = 0; e < n; ++e)
    if (seen[e] != 1) fail("partition: element " + std::to_string(e) + " covered " + std::to_string(seen[e]) + " times");
  if (!rep.ok) return rep;
  // rooted forest with consecutive levels
  for (size_t k = 0; k < m; ++k) {
    int p = T.parent[k];
    if (p < 0) {
      if (T.level[k] != 1) fail("forest: parentless class " + std::to_string(k) + " at level " + std::to_string(T.level[k]));
    } else if (p >= static_cast<int>(m) || T.level[p] != T.level[k] - 1) {
      fail("forest: class " + std::to_string(k) + " has a bad parent");
    }
  }
  if (!rep.ok) return rep;
  if (T.height() > d) fail("height " + std::to_string(T.height()) + " exceeds " + std::to_string(d));
  auto anc = [&](int a, int b) {  // class a is an ancestor of (or equal to) class b
    for (int k = b; k >= 0; k = T.parent[k])
      if (k == a) return true;
    return false;
  };
  for (auto [u, v] : gaifman_edges(A)) {
    int a = T.class_of[u], b = T.class_of[v];
    if (!anc(a, b) && !anc(b, a)) fail("edge " + std::to_string(u) + "-" + std::to_string(v) + " joins unrelated classes");
    auto bg = T.bag(std::max(a, b, [&](int x, int y) { return T.level[x] < T.level[y]; }));
    if (!std::binary_search(bg.begin(), bg.end(), u) || !std::binary_search(bg.begin(), bg.end(), v))
      fail("edge " + std::to_string(u) + "-" + std::to_string(v) + " in no bag");
  }
  // each class is the root set of its residual component
  for (size_t k = 0; k < m; ++k) {
    std::vector<int> resid;
    for (int e = 0; e < n; ++e)
      if (T.level[T.class_of[e]] >= T.level[k]) resid.push_back(e);
    auto R = induced(A, resid);
    int start = -1;
    for (int i = 0; i < R.s.n; ++i)
      if (R.to_parent[i] == T.classes[k][0]) start = i;
    for (auto& c : components(R.s)) {
      bool has = false;
      for (int e : c.to_parent) has = has || e == start;
      if (!has) continue;
      std::vector<int> want;
      for (int r : roots_of(c.s)) want.push_back(R.to_parent[c.to_parent[r]]);
      std::sort(want.begin(), want.end());
      if (want != T.classes[k]) fail("class " + std::to_string(k) + " is not the root set of its component");
    }
  }
  if (!with_formulas || !rep.ok) return rep;
  const auto& F = cached_formulas(A.sig, d, LevelReading::Component);
  auto E = pair_table(A, F.eps);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (static_cast<bool>(E[a][b]) != (T.class_of[a] == T.class_of[b]))
        fail("eps disagrees with the classes at (" + std::to_string(a) + "," + std::to_string(b) + ")");
  auto Al = pair_table(A, F.alpha);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      for (int a2 : T.classes[T.class_of[a]])
        for (int b2 : T.classes[T.class_of[b]])
          if (Al[a][b] != Al[a2][b2]) fail("alpha not invariant under eps");
      bool want = T.parent[T.class_of[b]] == T.class_of[a];
      if (static_cast<bool>(Al[a][b]) != want)
        fail("alpha disagrees with the parent map at (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
  return rep;
}

std::string decomposition_json(const TreeDecomposition& T) {
  nlohmann::json j;
  j["classes"] = T.classes;
  j["parent"] = T.parent;
  j["level"] = T.level;
  std::vector<std::vector<int>> bags;
  for (size_t k = 0; k < T.classes.size(); ++k) bags.push_back(T.bag(static_cast<int>(k)));
  j["bags"] = bags;
  j["height"] = T.height();
  return j.dump();
}

}  // namespace tdl
