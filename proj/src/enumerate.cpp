#include "tdl/enumerate.hpp"

#include <numeric>
#include <unordered_set>

#include "tdl/treedepth.hpp"

namespace tdl {

namespace {

// tuples that mention the new element e and otherwise only 0..e-1
std::vector<std::pair<int, Tuple>> fresh_tuples(const Signature& sig, int e, bool graph_mode) {
  std::vector<std::pair<int, Tuple>> out;
  for (int s = 0; s < sig.size(); ++s) {
    int k = sig[s].arity;
    bool g = graph_mode && k == 2;
    std::vector<int> idx(k, 0);
    for (;;) {
      bool has = false;
      for (int i : idx) has |= i == e;
      bool ok = has;
      if (g && ok) ok = idx[0] < idx[1];  // one orientation, no loops
      if (ok) out.push_back({s, Tuple(idx.begin(), idx.end())});
      int i = 0;
      while (i < k && ++idx[i] == e + 1) idx[i++] = 0;
      if (i == k) break;
    }
  }
  return out;
}

}  // namespace

void enum_structures(const Signature& sig, const EnumOptions& opt, const std::function<bool(const Structure&)>& cb) {
  std::vector<Structure> level;  // representatives of the current size
  level.push_back(Structure(sig, 0));
  auto accept = [&](const Structure& A) {
    if (A.n < opt.min_size) return true;
    if (opt.connected && !is_connected(A)) return true;
    return cb(A);
  };
  if (opt.min_size <= 0 && !opt.connected)
    if (!accept(level[0])) return;
  for (int n = 1; n <= opt.max_size; ++n) {
    auto cand = fresh_tuples(sig, n - 1, opt.graph_mode);
    if (cand.size() > 24) throw BudgetError("enumerate: too many tuples through a new element");
    std::vector<Structure> next;
    std::unordered_set<std::string> seen;
    for (auto& P : level) {
      for (uint64_t m = 0; m < (uint64_t{1} << cand.size()); ++m) {
        budget::check();
        Structure A(sig, n);
        A.rel = P.rel;
        A.rel.resize(sig.size());
        for (size_t i = 0; i < cand.size(); ++i)
          if (m >> i & 1) {
            auto& [s, t] = cand[i];
            A.rel[s].push_back(t);
            if (opt.graph_mode && sig[s].arity == 2) A.rel[s].push_back({t[1], t[0]});
          }
        A.normalize();
        if (opt.connected && !is_connected(A)) continue;
        if (opt.td >= 0 && tree_depth(A) > opt.td) continue;
        if (!seen.insert(canonical_form(A)).second) continue;
        next.push_back(std::move(A));
      }
    }
    level = std::move(next);
    if (n >= opt.min_size)
      for (auto& A : level)
        if (!accept(A)) return;
  }
}

std::vector<Structure> enum_structures(const Signature& sig, const EnumOptions& opt) {
  std::vector<Structure> out;
  enum_structures(sig, opt, [&](const Structure& A) {
    out.push_back(A);
    return true;
  });
  return out;
}

void enum_orders(const Structure& A, const std::function<bool(const Structure&)>& cb) {
  if (A.n > 10) throw BudgetError("enum_orders: more than 10! orders");
  std::vector<int> perm(A.n);
  std::iota(perm.begin(), perm.end(), 0);
  Structure B = without_order(A);
  do {
    budget::check();
    B.order = perm;
    if (!cb(B)) return;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<Structure> all_orders(const Structure& A) {
  std::vector<Structure> out;
  enum_orders(A, [&](const Structure& B) {
    out.push_back(B);
    return true;
  });
  return out;
}

}  // namespace tdl
