#include "tdl/automata.hpp"

#include <algorithm>
#include <map>

namespace tdl {

bool Dfa::run(const std::vector<uint32_t>& word) const {
  int s = start;
  for (auto l : word) s = delta[s][l];
  return accept[s];
}

Dfa dfa_minimize(const Dfa& a) {
  int n = a.states(), L = 1 << a.bits;
  // reachable part first
  std::vector<int> id(n, -1), order{a.start};
  id[a.start] = 0;
  for (size_t i = 0; i < order.size(); ++i)
    for (int l = 0; l < L; ++l) {
      int t = a.delta[order[i]][l];
      if (id[t] < 0) {
        id[t] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  int m = static_cast<int>(order.size());
  std::vector<int> cls(m);
  for (int i = 0; i < m; ++i) cls[i] = a.accept[order[i]] ? 1 : 0;
  int ncls = 0;
  for (;;) {
    std::map<std::vector<int>, int> sig;
    std::vector<int> next(m);
    for (int i = 0; i < m; ++i) {
      std::vector<int> key{cls[i]};
      for (int l = 0; l < L; ++l) key.push_back(cls[id[a.delta[order[i]][l]]]);
      auto it = sig.emplace(std::move(key), static_cast<int>(sig.size())).first;
      next[i] = it->second;
    }
    int k = static_cast<int>(sig.size());
    cls.swap(next);
    if (k == ncls) break;
    ncls = k;
  }
  Dfa out;
  out.bits = a.bits;
  out.accept.assign(ncls, false);
  out.delta.assign(ncls, std::vector<int>(L, 0));
  for (int i = 0; i < m; ++i) {
    out.accept[cls[i]] = a.accept[order[i]];
    for (int l = 0; l < L; ++l) out.delta[cls[i]][l] = cls[id[a.delta[order[i]][l]]];
  }
  out.start = cls[0];
  return out;
}

namespace {

Dfa constant(int bits, bool v) {
  Dfa d;
  d.bits = bits;
  d.accept = {v};
  d.delta = {std::vector<int>(1 << bits, 0)};
  return d;
}

// two states: 0 live, 1 dead; dead on letters failing ok()
template <class F>
Dfa guard(int bits, F ok) {
  Dfa d;
  d.bits = bits;
  d.accept = {true, false};
  d.delta.assign(2, std::vector<int>(1 << bits, 1));
  for (int l = 0; l < (1 << bits); ++l)
    if (ok(static_cast<uint32_t>(l))) d.delta[0][l] = 0;
  return d;
}

Dfa product(const Dfa& a, const Dfa& b, int op) {  // 0 and, 1 or, 2 implies
  Dfa d;
  d.bits = a.bits;
  int L = 1 << a.bits, nb = b.states();
  d.accept.resize(a.states() * nb);
  d.delta.assign(a.states() * nb, std::vector<int>(L));
  for (int i = 0; i < a.states(); ++i)
    for (int j = 0; j < nb; ++j) {
      int s = i * nb + j;
      bool x = a.accept[i], y = b.accept[j];
      d.accept[s] = op == 0 ? (x && y) : op == 1 ? (x || y) : (!x || y);
      for (int l = 0; l < L; ++l) d.delta[s][l] = a.delta[i][l] * nb + b.delta[j][l];
    }
  d.start = a.start * nb + b.start;
  return dfa_minimize(d);
}

Dfa complement(Dfa a) {
  for (size_t i = 0; i < a.accept.size(); ++i) a.accept[i] = !a.accept[i];
  return a;
}

// exactly one position carries the bit
Dfa singleton(int bits, int bit) {
  Dfa d;
  d.bits = bits;
  d.accept = {false, true, false};
  d.delta.assign(3, std::vector<int>(1 << bits, 2));
  for (int l = 0; l < (1 << bits); ++l) {
    bool on = l >> bit & 1;
    d.delta[0][l] = on ? 1 : 0;
    d.delta[1][l] = on ? 2 : 1;
  }
  return d;
}

// drop the top bit by subset construction
Dfa project_top(const Dfa& a) {
  int bits = a.bits - 1, L = 1 << bits;
  Dfa d;
  d.bits = bits;
  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> sets{{a.start}};
  id[sets[0]] = 0;
  for (size_t i = 0; i < sets.size(); ++i) {
    d.delta.emplace_back(L);
    bool acc = false;
    for (int s : sets[i]) acc = acc || a.accept[s];
    d.accept.push_back(acc);
    for (int l = 0; l < L; ++l) {
      std::vector<int> t;
      for (int s : sets[i]) {
        t.push_back(a.delta[s][l]);
        t.push_back(a.delta[s][l | L]);
      }
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      auto it = id.find(t);
      int k;
      if (it == id.end()) {
        k = static_cast<int>(sets.size());
        id.emplace(t, k);
        sets.push_back(t);
      } else {
        k = it->second;
      }
      d.delta[i][l] = k;
    }
  }
  return dfa_minimize(d);
}

struct Compiler {
  const Signature& sig;
  int nb;
  std::vector<std::pair<std::string, bool>> scope;  // (name, is set)

  int bits() const { return nb + static_cast<int>(scope.size()); }
  int bit_of(const std::string& v, bool set) const {
    for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i)
      if (scope[i].first == v) {
        if (scope[i].second != set) throw InputError("word automaton: variable kind mismatch for " + v);
        return nb + i;
      }
    throw InputError("word automaton: free variable " + v);
  }

  Dfa go(const Formula& f) {
    int B = bits();
    switch (f->kind) {
      case Kind::True: return constant(B, true);
      case Kind::False: return constant(B, false);
      case Kind::Eq: {
        int x = bit_of(f->args[0], false), y = bit_of(f->args[1], false);
        return guard(B, [&](uint32_t l) { return (l >> x & 1) == (l >> y & 1); });
      }
      case Kind::Leq: {
        int x = bit_of(f->args[0], false), y = bit_of(f->args[1], false);
        Dfa d;
        d.bits = B;
        d.accept = {false, false, true, false};
        d.delta.assign(4, std::vector<int>(1 << B, 3));
        for (int l = 0; l < (1 << B); ++l) {
          bool bx = l >> x & 1, by = l >> y & 1;
          d.delta[0][l] = bx && by ? 2 : bx ? 1 : by ? 3 : 0;
          d.delta[1][l] = by ? 2 : 1;
          d.delta[2][l] = 2;
        }
        return d;
      }
      case Kind::SetAtom: {
        int X = bit_of(f->name, true), x = bit_of(f->args[0], false);
        return guard(B, [&](uint32_t l) { return !(l >> x & 1) || (l >> X & 1); });
      }
      case Kind::Atom: {
        int s = sig.index(f->name);
        if (s < 0) throw InputError("word automaton: unknown relation " + f->name);
        int x0 = bit_of(f->args[0], false);
        std::vector<int> xs;
        for (auto& a : f->args) xs.push_back(bit_of(a, false));
        // a tuple is a loop at one position
        return guard(B, [&](uint32_t l) {
          for (int x : xs)
            if ((l >> x & 1) != (l >> x0 & 1)) return false;
          return !(l >> x0 & 1) || (l >> s & 1);
        });
      }
      case Kind::Not: return complement(go(f->kids[0]));
      case Kind::And:
      case Kind::Or: {
        Dfa acc = go(f->kids[0]);
        for (size_t i = 1; i < f->kids.size(); ++i) acc = product(acc, go(f->kids[i]), f->kind == Kind::And ? 0 : 1);
        return acc;
      }
      case Kind::Implies: return product(go(f->kids[0]), go(f->kids[1]), 2);
      case Kind::Exists:
      case Kind::Forall:
      case Kind::ExistsSet:
      case Kind::ForallSet: {
        bool set = f->kind == Kind::ExistsSet || f->kind == Kind::ForallSet;
        bool ex = f->kind == Kind::Exists || f->kind == Kind::ExistsSet;
        scope.push_back({f->name, set});
        Dfa body = go(f->kids[0]);
        if (!ex) body = complement(body);
        if (!set) body = product(body, singleton(bits(), bits() - 1), 0);
        scope.pop_back();
        Dfa r = project_top(body);
        return ex ? r : complement(r);
      }
      case Kind::ExistsMod: throw InputError("word automaton: modulo quantifiers are not supported");
    }
    throw InputError("word automaton: unexpected node");
  }
};

}  // namespace

Dfa compile_word_sentence(const Formula& phi, const Signature& sig) {
  if (!free_vars(phi).empty() || !free_set_vars(phi).empty()) throw InputError("word automaton: sentence expected");
  if (sig.size() > 8) throw InputError("word automaton: signature too large");
  Compiler C{sig, sig.size(), {}};
  return dfa_minimize(C.go(phi));
}

uint32_t word_letter(const Structure& A, int e) {
  uint32_t l = 0;
  for (int s = 0; s < A.sig.size(); ++s)
    if (A.holds(s, Tuple(A.sig[s].arity, e))) l |= 1u << s;
  return l;
}

std::vector<uint32_t> structure_word(const Structure& A) {
  if (!A.ordered()) throw InputError("structure_word: ordered structure expected");
  for (int s = 0; s < A.sig.size(); ++s)
    for (auto& t : A.rel[s])
      for (int v : t)
        if (v != t[0]) throw DomainError("structure_word: a tuple is not a loop");
  std::vector<uint32_t> w;
  for (int e : *A.order) w.push_back(word_letter(A, e));
  return w;
}

int dfa_letter_period(const Dfa& a, const std::vector<uint32_t>& letters, int max_p) {
  int n = a.states();
  std::vector<std::vector<std::vector<int>>> pw;  // pw[i][k] = f_i^(k+1)
  for (auto l : letters) {
    std::vector<int> f(n);
    for (int s = 0; s < n; ++s) f[s] = a.delta[s][l];
    pw.push_back({f});
  }
  auto power = [&](size_t i, int e) -> const std::vector<int>& {
    auto& v = pw[i];
    while (static_cast<int>(v.size()) < e) {
      std::vector<int> g(n);
      for (int s = 0; s < n; ++s) g[s] = v[0][v.back()[s]];
      v.push_back(g);
    }
    return v[e - 1];
  };
  for (int p = 1; p <= max_p; ++p) {
    bool ok = true;
    for (size_t i = 0; i < letters.size() && ok; ++i) ok = power(i, p) == power(i, 2 * p);
    if (ok) return p;
  }
  throw BudgetError("dfa_letter_period: no period up to " + std::to_string(max_p));
}

}  // namespace tdl
