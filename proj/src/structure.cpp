#include "tdl/structure.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace tdl {

// ---------------------------------------------------------------- signature

Signature::Signature(std::vector<Symbol> syms) : syms_(std::move(syms)) {
  for (size_t i = 0; i < syms_.size(); ++i) {
    const auto& s = syms_[i];
    if (s.name.empty()) throw InputError("empty symbol name");
    if (s.arity < 1) throw InputError("symbol " + s.name + " has arity < 1");
    if (s.name == "<=" && s.arity != 2) throw InputError("<= is reserved for a binary symbol");
    for (size_t j = 0; j < i; ++j)
      if (syms_[j].name == s.name) throw InputError("duplicate symbol " + s.name);
  }
}

int Signature::index(std::string_view name) const {
  for (size_t i = 0; i < syms_.size(); ++i)
    if (syms_[i].name == name) return static_cast<int>(i);
  return -1;
}

int Signature::max_arity() const {
  int m = 0;
  for (auto& s : syms_) m = std::max(m, s.arity);
  return m;
}

std::string expanded_name(const std::string& base, const std::vector<int>& idx) {
  std::string s = base + "__{";
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(idx[i]);
  }
  return s + "}";
}

bool split_expanded_name(const std::string& name, std::string* base, std::vector<int>* idx) {
  if (name.empty() || name.back() != '}') return false;
  auto p = name.rfind("__{");
  if (p == std::string::npos || p == 0) return false;
  std::vector<int> v;
  std::string body = name.substr(p + 3, name.size() - p - 4);
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) return false;
    v.push_back(std::stoi(tok));
  }
  if (v.empty()) return false;
  if (base) *base = name.substr(0, p);
  if (idx) *idx = v;
  return true;
}

// subsets in increasing mask order: {1},{2},{1,2},{3},...
static std::vector<std::vector<int>> nonempty_subsets(int k) {
  std::vector<std::vector<int>> out;
  for (int m = 1; m < (1 << k); ++m) {
    std::vector<int> I;
    for (int i = 0; i < k; ++i)
      if (m >> i & 1) I.push_back(i + 1);
    out.push_back(I);
  }
  return out;
}

Signature Signature::expand() const {
  std::vector<Symbol> out;
  for (auto& s : syms_)
    for (auto& I : nonempty_subsets(s.arity))
      out.push_back({expanded_name(s.name, I), static_cast<int>(I.size())});
  return Signature(out);
}

Signature Signature::with(const Symbol& s) const {
  auto v = syms_;
  v.push_back(s);
  return Signature(v);
}

std::string Signature::str() const {
  std::string s;
  for (size_t i = 0; i < syms_.size(); ++i) {
    if (i) s += ',';
    s += syms_[i].name + ":" + std::to_string(syms_[i].arity);
  }
  return s;
}

Signature Signature::parse_spec(std::string_view spec) {
  std::vector<Symbol> v;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    auto c = cur.rfind(':');
    if (c == std::string::npos || c == 0 || c + 1 == cur.size())
      throw InputError("bad symbol spec '" + cur + "' (want NAME:ARITY)");
    std::string ar = cur.substr(c + 1);
    if (ar.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("bad arity in '" + cur + "'");
    v.push_back({cur.substr(0, c), std::stoi(ar)});
    cur.clear();
  };
  // commas inside "__{1,2}" belong to the name
  int depth = 0;
  for (char ch : spec) {
    if (ch == '{') ++depth;
    if (ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      flush();
      continue;
    }
    if (ch != ' ') cur += ch;
  }
  flush();
  return Signature(v);
}

// ---------------------------------------------------------------- structure

Structure::Structure(Signature s, int size) : sig(std::move(s)), n(size) {
  if (size < 0) throw InputError("negative universe size");
  rel.resize(sig.size());
}

bool Structure::holds(int sym, const Tuple& t) const {
  auto& r = rel[sym];
  return std::binary_search(r.begin(), r.end(), t);
}

void Structure::add(int sym, Tuple t) {
  if (sym < 0 || sym >= sig.size()) throw InputError("bad symbol index");
  if (static_cast<int>(t.size()) != sig[sym].arity)
    throw InputError("tuple length mismatch for " + sig[sym].name);
  for (int e : t)
    if (e < 0 || e >= n) throw InputError("element out of range in " + sig[sym].name);
  auto& r = rel[sym];
  auto it = std::lower_bound(r.begin(), r.end(), t);
  if (it == r.end() || *it != t) r.insert(it, std::move(t));
}

void Structure::add(std::string_view sym, Tuple t) {
  int i = sig.index(sym);
  if (i < 0) throw InputError("unknown symbol " + std::string(sym));
  add(i, std::move(t));
}

void Structure::normalize() {
  rel.resize(sig.size());
  for (auto& r : rel) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
}

void Structure::validate() const {
  if (static_cast<int>(rel.size()) != sig.size()) throw InputError("relation count mismatch");
  for (int s = 0; s < sig.size(); ++s)
    for (auto& t : rel[s]) {
      if (static_cast<int>(t.size()) != sig[s].arity) throw InputError("tuple length mismatch");
      for (int e : t)
        if (e < 0 || e >= n) throw InputError("element out of range");
    }
  if (order) {
    if (static_cast<int>(order->size()) != n) throw InputError("order must list every element once");
    std::vector<char> seen(n, 0);
    for (int e : *order) {
      if (e < 0 || e >= n || seen[e]) throw InputError("order must list every element once");
      seen[e] = 1;
    }
  }
}

int Structure::tuple_count() const {
  int c = 0;
  for (auto& r : rel) c += static_cast<int>(r.size());
  return c;
}

std::vector<int> Structure::order_rank() const {
  std::vector<int> pos(n);
  if (!order) {
    std::iota(pos.begin(), pos.end(), 0);
    return pos;
  }
  for (int i = 0; i < n; ++i) pos[(*order)[i]] = i;
  return pos;
}

bool Structure::operator==(const Structure& o) const {
  return sig == o.sig && n == o.n && rel == o.rel && order == o.order;
}

// ---------------------------------------------------------------- text

std::string to_text(const Structure& A) {
  std::string s;
  for (auto& sym : A.sig.symbols()) s += "sig " + sym.name + " " + std::to_string(sym.arity) + "\n";
  s += "universe " + std::to_string(A.n) + "\n";
  for (int i = 0; i < A.sig.size(); ++i)
    for (auto& t : A.rel[i]) {
      s += "rel " + A.sig[i].name;
      for (int e : t) s += " " + std::to_string(e);
      s += "\n";
    }
  if (A.order) {
    s += "order";
    for (int e : *A.order) s += " " + std::to_string(e);
    s += "\n";
  }
  return s;
}

static int parse_int(const std::string& tok, int line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw InputError("line " + std::to_string(line) + ": expected a natural number, got '" + tok + "'");
  return std::stoi(tok);
}

Structure parse_structure(std::string_view text) {
  std::vector<Symbol> syms;
  int n = -1;
  std::vector<std::pair<std::string, Tuple>> tuples;
  std::optional<std::vector<int>> order;
  std::istringstream in{std::string(text)};
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    const auto& kw = tok[0];
    if (kw == "sig") {
      if (tok.size() != 3) throw InputError("line " + std::to_string(ln) + ": sig NAME ARITY");
      syms.push_back({tok[1], parse_int(tok[2], ln)});
    } else if (kw == "universe") {
      if (tok.size() != 2) throw InputError("line " + std::to_string(ln) + ": universe N");
      n = parse_int(tok[1], ln);
    } else if (kw == "rel") {
      if (tok.size() < 2) throw InputError("line " + std::to_string(ln) + ": rel NAME ELEMS...");
      Tuple t;
      for (size_t i = 2; i < tok.size(); ++i) t.push_back(parse_int(tok[i], ln));
      tuples.emplace_back(tok[1], t);
    } else if (kw == "order") {
      std::vector<int> o;
      for (size_t i = 1; i < tok.size(); ++i) o.push_back(parse_int(tok[i], ln));
      order = o;
    } else {
      throw InputError("line " + std::to_string(ln) + ": unknown keyword '" + kw + "'");
    }
  }
  if (n < 0) throw InputError("missing universe line");
  Structure A(Signature(syms), n);
  for (auto& [name, t] : tuples) A.add(name, t);
  A.order = order;
  A.validate();
  return A;
}

Structure load_structure(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_structure(ss.str());
}

void save_structure(const Structure& A, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << to_text(A);
}

// ---------------------------------------------------------------- gaifman

std::set<std::pair<int, int>> gaifman_edges(const Structure& A) {
  std::set<std::pair<int, int>> E;
  for (auto& r : A.rel)
    for (auto& t : r)
      for (size_t i = 0; i < t.size(); ++i)
        for (size_t j = i + 1; j < t.size(); ++j)
          if (t[i] != t[j]) E.insert({std::min(t[i], t[j]), std::max(t[i], t[j])});
  return E;
}

std::vector<std::vector<int>> gaifman_adjacency(const Structure& A) {
  std::vector<std::vector<int>> adj(A.n);
  for (auto [a, b] : gaifman_edges(A)) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

std::vector<uint64_t> gaifman_masks(const Structure& A) {
  if (A.n > 64) throw DomainError("gaifman_masks: more than 64 elements");
  std::vector<uint64_t> m(A.n, 0);
  for (auto& r : A.rel)
    for (auto& t : r)
      for (int a : t)
        for (int b : t)
          if (a != b) m[a] |= uint64_t{1} << b;
  return m;
}

std::vector<int> component_ids(const Structure& A) {
  auto adj = gaifman_adjacency(A);
  std::vector<int> id(A.n, -1);
  int c = 0;
  for (int s = 0; s < A.n; ++s) {
    if (id[s] >= 0) continue;
    std::vector<int> st{s};
    id[s] = c;
    while (!st.empty()) {
      int v = st.back();
      st.pop_back();
      for (int w : adj[v])
        if (id[w] < 0) {
          id[w] = c;
          st.push_back(w);
        }
    }
    ++c;
  }
  return id;
}

std::vector<SubStructure> components(const Structure& A) {
  auto id = component_ids(A);
  int k = A.n ? *std::max_element(id.begin(), id.end()) + 1 : 0;
  std::vector<std::vector<int>> parts(k);
  for (int e = 0; e < A.n; ++e) parts[id[e]].push_back(e);
  std::vector<SubStructure> out;
  for (auto& p : parts) out.push_back(induced(A, p));
  return out;
}

bool is_connected(const Structure& A) {
  if (A.n <= 1) return A.n == 1;
  auto id = component_ids(A);
  return std::all_of(id.begin(), id.end(), [](int c) { return c == 0; });
}

int distance(const Structure& A, int a, int b) {
  if (a < 0 || b < 0 || a >= A.n || b >= A.n) throw InputError("distance: element out of range");
  if (a == b) return 0;
  auto adj = gaifman_adjacency(A);
  std::vector<int> dist(A.n, -1);
  std::queue<int> q;
  q.push(a);
  dist[a] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        if (w == b) return dist[w];
        q.push(w);
      }
  }
  return kInfinity;
}

SubStructure induced(const Structure& A, const std::vector<int>& elems) {
  SubStructure out;
  out.to_parent = elems;
  std::sort(out.to_parent.begin(), out.to_parent.end());
  std::vector<int> inv(A.n, -1);
  for (size_t i = 0; i < out.to_parent.size(); ++i) inv[out.to_parent[i]] = static_cast<int>(i);
  Structure B(A.sig, static_cast<int>(out.to_parent.size()));
  for (int s = 0; s < A.sig.size(); ++s)
    for (auto& t : A.rel[s]) {
      Tuple u;
      bool ok = true;
      for (int e : t) {
        if (inv[e] < 0) {
          ok = false;
          break;
        }
        u.push_back(inv[e]);
      }
      if (ok) B.rel[s].push_back(u);
    }
  if (A.order) {
    std::vector<int> o;
    for (int e : *A.order)
      if (inv[e] >= 0) o.push_back(inv[e]);
    B.order = o;
  }
  B.normalize();
  out.s = std::move(B);
  return out;
}

SubStructure remove_and_expand(const Structure& A, int r) {
  if (r < 0 || r >= A.n) throw InputError("remove_and_expand: element out of range");
  if (A.n < 2) throw DomainError("remove_and_expand: universe must have at least two elements");
  SubStructure out;
  std::vector<int> inv(A.n, -1);
  for (int e = 0; e < A.n; ++e)
    if (e != r) {
      inv[e] = static_cast<int>(out.to_parent.size());
      out.to_parent.push_back(e);
    }
  Signature ex = A.sig.expand();
  Structure B(ex, A.n - 1);
  int base = 0;
  for (int s = 0; s < A.sig.size(); ++s) {
    int k = A.sig[s].arity;
    for (auto& t : A.rel[s]) {
      int mask = 0;
      Tuple u;
      for (int i = 0; i < k; ++i)
        if (t[i] != r) {
          mask |= 1 << i;
          u.push_back(inv[t[i]]);
        }
      if (mask) B.rel[base + mask - 1].push_back(u);
    }
    base += (1 << k) - 1;
  }
  if (A.order) {
    std::vector<int> o;
    for (int e : *A.order)
      if (e != r) o.push_back(inv[e]);
    B.order = o;
  }
  B.normalize();
  out.s = std::move(B);
  return out;
}

Structure add_root(const Structure& B, const Signature& sig, const AtomicType& alpha) {
  if (!(B.sig == sig.expand())) throw InputError("add_root: signature is not the expansion");
  Structure A(sig, B.n + 1);
  int r = B.n;
  int base = 0;
  for (int s = 0; s < sig.size(); ++s) {
    int k = sig[s].arity;
    for (int mask = 1; mask < (1 << k); ++mask)
      for (auto& u : B.rel[base + mask - 1]) {
        Tuple t(k, r);
        int j = 0;
        for (int i = 0; i < k; ++i)
          if (mask >> i & 1) t[i] = u[j++];
        A.rel[s].push_back(t);
      }
    if (alpha.count(sig[s].name)) A.rel[s].push_back(Tuple(k, r));
    base += (1 << k) - 1;
  }
  A.normalize();
  return A;
}

Structure forget_expansion(const Structure& B, const Signature& sig) {
  Structure A(sig, B.n);
  for (int s = 0; s < sig.size(); ++s) {
    std::vector<int> full(sig[s].arity);
    std::iota(full.begin(), full.end(), 1);
    int i = B.sig.index(expanded_name(sig[s].name, full));
    if (i < 0) throw InputError("forget_expansion: missing " + sig[s].name);
    A.rel[s] = B.rel[i];
  }
  A.order = B.order;
  return A;
}

// ---------------------------------------------------------------- atomic types

AtomicType atomic_type(const Structure& A, int a) {
  if (a < 0 || a >= A.n) throw InputError("atomic_type: element out of range");
  AtomicType t;
  for (int s = 0; s < A.sig.size(); ++s)
    if (A.holds(s, Tuple(A.sig[s].arity, a))) t.insert(A.sig[s].name);
  return t;
}

std::string atomic_type_str(const AtomicType& a) {
  std::string s = "{";
  bool first = true;
  for (auto& x : a) {
    if (!first) s += ",";
    s += x;
    first = false;
  }
  return s + "}";
}

std::vector<AtomicType> all_atomic_types(const Signature& sig) {
  int k = sig.size();
  if (k > 20) throw BudgetError("too many atomic types");
  std::vector<AtomicType> out;
  for (int m = 0; m < (1 << k); ++m) {
    AtomicType t;
    for (int i = 0; i < k; ++i)
      if (m >> i & 1) t.insert(sig[i].name);
    out.push_back(t);
  }
  // shorter first, then lexicographic on the sorted name lists
  std::sort(out.begin(), out.end(), [](const AtomicType& a, const AtomicType& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// ---------------------------------------------------------------- sums

static Structure shifted_union(const Structure& A, const Structure& B) {
  if (!(A.sig == B.sig)) throw InputError("signature mismatch");
  Structure C(A.sig, A.n + B.n);
  for (int s = 0; s < A.sig.size(); ++s) {
    C.rel[s] = A.rel[s];
    for (auto t : B.rel[s]) {
      for (int& e : t) e += A.n;
      C.rel[s].push_back(t);
    }
  }
  C.normalize();
  return C;
}

Structure disjoint_union(const Structure& A, const Structure& B) {
  if (A.ordered() != B.ordered()) throw InputError("disjoint_union: mixing ordered and unordered");
  if (A.ordered()) return ordered_sum(A, B);
  return shifted_union(A, B);
}

Structure ordered_sum(const Structure& A, const Structure& B) {
  if (!A.ordered() || !B.ordered()) throw InputError("ordered_sum: both structures must be ordered");
  Structure C = shifted_union(A, B);
  std::vector<int> o = *A.order;
  for (int e : *B.order) o.push_back(e + A.n);
  C.order = o;
  return C;
}

Structure with_order(const Structure& A, std::vector<int> order) {
  Structure B = A;
  B.order = std::move(order);
  B.validate();
  return B;
}

Structure without_order(const Structure& A) {
  Structure B = A;
  B.order.reset();
  return B;
}

Structure relabel(const Structure& A, const std::vector<int>& perm) {
  Structure B(A.sig, A.n);
  for (int s = 0; s < A.sig.size(); ++s)
    for (auto t : A.rel[s]) {
      for (int& e : t) e = perm[e];
      B.rel[s].push_back(t);
    }
  if (A.order) {
    std::vector<int> o;
    for (int e : *A.order) o.push_back(perm[e]);
    B.order = o;
  }
  B.normalize();
  return B;
}

// ---------------------------------------------------------------- canonical form

namespace {

// Colour refinement from an initial colouring. Colours come from sorted
// invariant signatures, so the partition and the ordering of its cells are
// isomorphism-invariant (relative to the initial colouring).
std::vector<int> refine_colours(const Structure& A, std::vector<int> col) {
  int ncol = static_cast<int>(std::set<int>(col.begin(), col.end()).size());
  for (;;) {
    std::vector<std::vector<int>> sig(A.n);
    std::vector<std::vector<std::vector<int>>> desc(A.n);
    for (int s = 0; s < A.sig.size(); ++s)
      for (auto& t : A.rel[s])
        for (size_t i = 0; i < t.size(); ++i) {
          int e = t[i];
          std::vector<int> d{s, static_cast<int>(i)};
          for (int x : t) d.push_back(x == e ? -1 : col[x]);
          desc[e].push_back(std::move(d));
        }
    for (int e = 0; e < A.n; ++e) {
      sig[e].push_back(col[e]);
      auto& D = desc[e];
      std::sort(D.begin(), D.end());
      for (auto& d : D) {
        sig[e].push_back(static_cast<int>(d.size()));
        sig[e].insert(sig[e].end(), d.begin(), d.end());
      }
    }
    std::map<std::vector<int>, int> rank;
    for (auto& s : sig) rank[s];
    int c = 0;
    for (auto& [k, v] : rank) v = c++;
    for (int e = 0; e < A.n; ++e) col[e] = rank[sig[e]];
    if (c == ncol) break;
    ncol = c;
  }
  return col;
}

std::vector<int> serialize(const Structure& A, const std::vector<int>& perm) {
  std::vector<int> out;
  std::vector<Tuple> buf;
  for (int s = 0; s < A.sig.size(); ++s) {
    buf.clear();
    for (auto& t : A.rel[s]) {
      Tuple u(t.size());
      for (size_t i = 0; i < t.size(); ++i) u[i] = perm[t[i]];
      buf.push_back(std::move(u));
    }
    std::sort(buf.begin(), buf.end());
    out.push_back(static_cast<int>(buf.size()));
    for (auto& u : buf) out.insert(out.end(), u.begin(), u.end());
  }
  return out;
}

}  // namespace

std::string canonical_form(const Structure& A) {
  std::string head = A.sig.str() + "|" + std::to_string(A.n) + "|";
  if (A.ordered()) {
    // the order pins every element; relabel by rank
    auto ser = serialize(A, A.order_rank());
    std::string s = head + "o|";
    for (int x : ser) s += std::to_string(x) + ",";
    return s;
  }
  // individualisation-refinement; transpositions that are automorphisms
  // prune sibling branches
  auto swap_is_auto = [&](int u, int v) {
    for (int s = 0; s < A.sig.size(); ++s)
      for (auto t : A.rel[s]) {
        for (int& e : t) e = e == u ? v : e == v ? u : e;
        if (!A.holds(s, t)) return false;
      }
    return true;
  };
  std::vector<int> best;
  bool have = false;
  uint64_t leaves = 0;
  std::function<void(std::vector<int>)> search = [&](std::vector<int> col) {
    col = refine_colours(A, std::move(col));
    std::vector<int> size(A.n, 0);
    for (int c : col) ++size[c];
    int target = -1;
    for (int c = 0; c < A.n; ++c)
      if (size[c] > 1) {
        target = c;
        break;
      }
    if (target < 0) {
      if (++leaves > 2000000) throw BudgetError("canonical_form: search too large");
      budget::check();
      auto ser = serialize(A, col);
      if (!have || ser < best) {
        best = std::move(ser);
        have = true;
      }
      return;
    }
    std::vector<int> tried;
    for (int v = 0; v < A.n; ++v) {
      if (col[v] != target) continue;
      bool skip = false;
      for (int u : tried)
        if (swap_is_auto(u, v)) {
          skip = true;
          break;
        }
      if (skip) continue;
      tried.push_back(v);
      std::vector<int> next(A.n);
      for (int e = 0; e < A.n; ++e) next[e] = 2 * col[e] + (e == v ? 0 : 1);
      search(std::move(next));
    }
  };
  search(std::vector<int>(A.n, 0));
  std::string s = head;
  for (int x : best) s += std::to_string(x) + ",";
  return s;
}

}  // namespace tdl
