#include "tdl/builders.hpp"

#include <algorithm>
#include <cmath>

#include "tdl/enumerate.hpp"
#include "tdl/treedepth.hpp"

namespace tdl {

Formula build_gaifman_adjacency(const Signature& sig, const std::string& x, const std::string& y, Fresh& fresh) {
  std::vector<Formula> alts;
  for (auto& s : sig.symbols()) {
    if (s.arity < 2) continue;
    for (int i = 0; i < s.arity; ++i)
      for (int j = 0; j < s.arity; ++j) {
        if (i == j) continue;
        std::vector<std::string> args(s.arity), others;
        for (int k = 0; k < s.arity; ++k) {
          if (k == i)
            args[k] = x;
          else if (k == j)
            args[k] = y;
          else {
            args[k] = fresh.var();
            others.push_back(args[k]);
          }
        }
        alts.push_back(exists(others, atom(s.name, args)));
      }
  }
  return conj(neq(x, y), disj(alts));
}

Formula build_dist_leq(const Signature& sig, int l, const std::string& x, const std::string& y, Fresh& fresh) {
  if (l < 0) throw InputError("dist: negative bound");
  if (l == 0) return eq(x, y);
  if (l == 1) return disj(eq(x, y), build_gaifman_adjacency(sig, x, y, fresh));
  std::string w = fresh.var();
  Formula a = build_dist_leq(sig, (l + 1) / 2, x, w, fresh);
  Formula b = build_dist_leq(sig, l / 2, w, y, fresh);
  return exists(w, conj(a, b));
}

Formula build_reach(const Signature& sig, int d, const std::string& x, const std::string& y, Fresh& fresh) {
  if (d < 0 || d > 20) throw InputError("reach: d out of range");
  return build_dist_leq(sig, 1 << d, x, y, fresh);
}

std::vector<Structure> td_obstructions(int d, int cap) {
  if (d < 1) throw InputError("td obstructions need d >= 1");
  if (cap < 0) cap = 1 << (d + 1);
  double bound = std::pow(2.0, std::pow(2.0, d - 1));
  if (cap < bound)
    throw DomainError("universal td_{<=" + std::to_string(d) + "}: cap " + std::to_string(cap) +
                      " is below the obstruction size bound " + std::to_string(static_cast<long long>(bound)));
  int limit = static_cast<int>(bound);
  if (limit > 9) throw BudgetError("universal td: obstruction search up to " + std::to_string(limit) + " vertices");
  Signature g({{"E", 2}});
  EnumOptions opt;
  opt.max_size = limit;
  opt.connected = true;
  opt.graph_mode = true;
  opt.td = d + 1;
  std::vector<Structure> out;
  for (auto& A : enum_structures(g, opt)) {
    if (tree_depth(A) != d + 1) continue;
    bool minimal = true;
    for (auto& t : A.rel[0]) {
      if (t[0] > t[1]) continue;
      Structure B = A;
      auto& r = B.rel[0];
      r.erase(std::remove(r.begin(), r.end(), t), r.end());
      r.erase(std::remove(r.begin(), r.end(), Tuple{t[1], t[0]}), r.end());
      if (tree_depth(B) > d) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(A);
  }
  return out;
}

Formula build_td_leq(const Signature& sig, int d, Fresh& fresh, TdMode mode, int cap) {
  if (d < 0) throw InputError("td_{<=d} needs d >= 0");
  if (d == 0) {
    std::string x = fresh.var();
    return neg(exists(x, f_true()));
  }
  if (d == 1) {
    std::string x = fresh.var(), y = fresh.var();
    return forall(x, forall(y, neg(build_gaifman_adjacency(sig, x, y, fresh))));
  }
  if (mode == TdMode::Universal) {
    // no obstruction occurs as a (not necessarily induced) subgraph of the Gaifman graph
    std::vector<Formula> occ;
    for (auto& O : td_obstructions(d, cap)) {
      std::vector<std::string> v;
      for (int i = 0; i < O.n; ++i) v.push_back(fresh.var());
      std::vector<Formula> parts;
      for (int i = 0; i < O.n; ++i)
        for (int j = i + 1; j < O.n; ++j) parts.push_back(neq(v[i], v[j]));
      for (auto& t : O.rel[0])
        if (t[0] < t[1]) parts.push_back(build_gaifman_adjacency(sig, v[t[0]], v[t[1]], fresh));
      occ.push_back(exists(v, conj(parts)));
    }
    return neg(disj(occ));
  }
  // every component has diameter < 2^d and, for some r in it, the rest of it has td <= d-1
  int L = 1 << d;
  std::string x = fresh.var(), y = fresh.var(), r = fresh.var(), z = fresh.var();
  Formula diam = forall(x, forall(y, implies(build_dist_leq(sig, L, x, y, fresh), build_dist_leq(sig, L - 1, x, y, fresh))));
  Formula inner = build_td_leq(sig, d - 1, fresh, mode, cap);
  Formula guard = conj(build_dist_leq(sig, L - 1, x, z, fresh), neq(z, r));
  Formula rest = relativise(inner, guard, z, fresh);
  Formula split = forall(x, exists(r, conj(build_dist_leq(sig, L - 1, x, r, fresh), rest)));
  return conj(diam, split);
}

TdMode preferred_td_mode(int d) { return d <= 2 ? TdMode::Universal : TdMode::Inductive; }

Formula build_td_gt(const Signature& sig, int d, Fresh& fresh, TdMode mode) {
  return neg(build_td_leq(sig, d, fresh, mode));
}

Formula build_td_eq(const Signature& sig, int j, Fresh& fresh, TdMode mode) {
  if (j == 0) return build_td_leq(sig, 0, fresh, mode);
  return conj(build_td_leq(sig, j, fresh, mode), neg(build_td_leq(sig, j - 1, fresh, mode)));
}

Formula build_roots(const Signature& sig, int d, const std::string& x, Fresh& fresh) {
  if (d < 1) throw InputError("roots_d needs d >= 1");
  std::vector<Formula> alts;
  for (int c = 0; c <= d - 1; ++c) {
    Formula gt = build_td_gt(sig, c, fresh, preferred_td_mode(c));
    std::string z = fresh.var();
    Formula le = relativise(build_td_leq(sig, c, fresh, preferred_td_mode(c)), neq(x, z), z, fresh);
    alts.push_back(conj(gt, le));
  }
  return disj(alts);
}

Formula build_atomic(const Signature& sig, const AtomicType& alpha, const std::string& x) {
  std::vector<Formula> parts;
  for (auto& s : sig.symbols()) {
    Formula a = atom(s.name, std::vector<std::string>(s.arity, x));
    parts.push_back(alpha.count(s.name) ? a : neg(a));
  }
  return conj(parts);
}

}  // namespace tdl
