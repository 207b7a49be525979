#include "tdl/qorder.hpp"

#include <algorithm>
#include <set>

#include "tdl/enumerate.hpp"
#include "tdl/treedepth.hpp"

namespace tdl {

namespace {

std::vector<int> inverse(const std::vector<int>& to_parent, int n) {
  std::vector<int> inv(n, -1);
  for (size_t i = 0; i < to_parent.size(); ++i) inv[to_parent[i]] = static_cast<int>(i);
  return inv;
}

// order of A restricted to the elements of the substructure, in its indices
std::vector<int> restrict_order(const std::vector<int>& order, const SubStructure& S, int n) {
  auto inv = inverse(S.to_parent, n);
  std::vector<int> out;
  for (int e : order)
    if (inv[e] >= 0) out.push_back(inv[e]);
  return out;
}

std::vector<AtomicType> root_alphas(const Structure& A, const std::vector<int>& roots) {
  std::vector<AtomicType> out;
  for (int r : roots) out.push_back(atomic_type(A, r));
  return out;
}

int ctx_of(Logic L, const Structure& A) {
  return type_ctx(A.sig, true, L == Logic::MSO ? Logic::MSO : Logic::FO);
}

}  // namespace

namespace {

QOrder q_order_impl(Logic L, int q, const Structure& A, bool want_type) {
  Structure U = A.ordered() ? without_order(A) : A;
  QOrder out;
  if (U.n == 0) {
    out.type = empty_type(ctx_of(L, U), q);
    return out;
  }
  if (U.n == 1) {
    out.order = {0};
    out.type = tp(L, q, with_order(U, {0}));
    return out;
  }
  auto comps = components(U);
  if (comps.size() == 1) {
    auto roots = roots_of(U);
    auto alphas = root_alphas(U, roots);
    AtomicType amin = alphas[0];
    for (auto& a : alphas)
      if (atomic_compare(a, amin) < 0) amin = a;
    bool have = false;
    TypeId best = -1;
    std::string best_cf;
    std::vector<int> best_order;
    int best_r = -1;
    for (size_t i = 0; i < roots.size(); ++i) {
      if (alphas[i] != amin) continue;
      int r = roots[i];
      auto B = remove_and_expand(U, r);
      QOrder sub = q_order_impl(L, q, B.s, true);
      std::string cf;
      if (have) {
        int c = type_compare(sub.type, best);
        if (c > 0) continue;
        if (c == 0) {
          cf = canonical_form(B.s);
          if (cf >= best_cf) continue;  // equal cf: the earlier (smaller) r stays
        }
      }
      if (cf.empty()) cf = canonical_form(B.s);
      have = true;
      best = sub.type;
      best_cf = cf;
      best_r = r;
      best_order.clear();
      best_order.push_back(r);
      for (int e : sub.order) best_order.push_back(B.to_parent[e]);
    }
    out.order = best_order;
    out.root = best_r;
    out.alpha = amin;
    out.rtp = best;
    if (want_type) out.type = add_root_type(U.sig, amin, best);
    return out;
  }
  struct Part {
    QOrder qo;
    std::string cf;
    int min_index;
    const SubStructure* c;
  };
  std::vector<Part> parts;
  for (auto& c : comps) {
    Part p{q_order_impl(L, q, c.s, true), canonical_form(c.s), *std::min_element(c.to_parent.begin(), c.to_parent.end()), &c};
    parts.push_back(std::move(p));
  }
  std::sort(parts.begin(), parts.end(), [](const Part& x, const Part& y) {
    int c = type_compare(x.qo.type, y.qo.type);
    if (c != 0) return c < 0;
    if (x.cf != y.cf) return x.cf < y.cf;
    return x.min_index < y.min_index;
  });
  if (want_type) out.type = empty_type(ctx_of(L, U), q);
  for (auto& p : parts) {
    for (int e : p.qo.order) out.order.push_back(p.c->to_parent[e]);
    if (want_type) out.type = compose(out.type, p.qo.type);
  }
  return out;
}

}  // namespace

QOrder q_order_full(Logic L, int q, const Structure& A) { return q_order_impl(L, q, A, true); }

Structure q_order(Logic L, int q, const Structure& A) {
  Structure U = A.ordered() ? without_order(A) : A;
  return with_order(U, q_order_impl(L, q, U, false).order);
}

bool is_q_order(Logic L, int q, const Structure& A) {
  if (!A.ordered()) throw InputError("is_q_order: structure carries no order");
  const auto& order = *A.order;
  if (A.n <= 1) return true;
  auto comps = components(A);
  if (comps.size() == 1) {
    int r = order[0];
    auto roots = roots_of(A);
    if (std::find(roots.begin(), roots.end(), r) == roots.end()) return false;
    AtomicType a = atomic_type(A, r);
    for (int s : roots)
      if (atomic_compare(atomic_type(A, s), a) < 0) return false;
    auto B = remove_and_expand(A, r);
    Structure Bo = with_order(without_order(B.s), restrict_order(order, B, A.n));
    if (!is_q_order(L, q, Bo)) return false;
    TypeId theta = tp_by_components(L, q, Bo);
    for (int s : roots) {
      if (s == r || atomic_type(A, s) != a) continue;
      auto C = remove_and_expand(A, s);
      if (type_compare(theta, q_order_full(L, q, C.s).type) > 0) return false;
    }
    return true;
  }
  auto rank = A.order_rank();
  std::vector<std::pair<int, const SubStructure*>> byfirst;
  for (auto& c : comps) {
    int lo = A.n, hi = -1;
    for (int e : c.to_parent) {
      lo = std::min(lo, rank[e]);
      hi = std::max(hi, rank[e]);
    }
    if (hi - lo + 1 != c.s.n) return false;  // not contiguous
    byfirst.push_back({lo, &c});
  }
  std::sort(byfirst.begin(), byfirst.end());
  TypeId prev = -1;
  for (auto& [lo, c] : byfirst) {
    Structure Co = with_order(without_order(c->s), restrict_order(order, *c, A.n));
    if (!is_q_order(L, q, Co)) return false;
    TypeId t = tp(L, q, Co);
    if (prev >= 0 && type_compare(prev, t) > 0) return false;
    prev = t;
  }
  return true;
}

TypeId tp_ordered(Logic L, int q, const Structure& A) { return q_order_full(L, q, A).type; }

TypeId rtp(Logic L, int q, const Structure& A) {
  if (A.n <= 1) throw DomainError("rtp: singleton structure");
  if (!is_connected(A)) throw DomainError("rtp: disconnected structure");
  return q_order_full(L, q, A).rtp;
}

TypeTable realized_types(const Signature& sig, Logic L, int q, int d, bool ordered, const TableOptions& opt) {
  TypeTable T;
  T.sig = sig;
  T.logic = L;
  T.q = q;
  T.d = d;
  T.ordered = ordered;
  EnumOptions eo;
  eo.min_size = 1;
  eo.max_size = opt.max_size;
  eo.td = d;
  eo.connected = true;
  eo.graph_mode = opt.graph_mode;
  std::map<TypeId, size_t> at;
  enum_structures(sig, eo, [&](const Structure& A) {
    budget::check();
    ++T.structures_seen;
    TypeId t = ordered ? tp_ordered(L, q, A) : tp_recursive(L, q, A);
    if (!at.count(t)) {
      at[t] = T.conn.size();
      T.conn.push_back({t, A, 0});
    }
    return true;
  });
  std::sort(T.conn.begin(), T.conn.end(),
            [](const TypeEntry& a, const TypeEntry& b) { return type_compare(a.type, b.type) < 0; });
  // Every type of a union is a product of powers of the connected types, in
  // sorted order for ordered sums; powers of a type are eventually periodic.
  std::vector<std::vector<TypeId>> powers;
  for (auto& e : T.conn) {
    try {
      e.threshold = stabilization_threshold(e.type);
    } catch (const BudgetError&) {
      e.threshold = -1;  // modular behaviour (MSO over orders)
    }
    std::vector<TypeId> pw{empty_type(type_ctx(sig, ordered, L), q)};
    std::set<TypeId> seen{pw[0]};
    for (;;) {
      TypeId nx = compose(pw.back(), e.type);
      if (!seen.insert(nx).second) break;
      pw.push_back(nx);
    }
    powers.push_back(pw);
  }
  std::vector<TypeId> layer{empty_type(type_ctx(sig, ordered, L), q)};
  T.closed_under_union = true;
  for (auto& pw : powers) {
    std::set<TypeId> next;
    for (size_t i = 0; i < layer.size() && T.closed_under_union; ++i)
      for (TypeId b : pw) {
        next.insert(compose(layer[i], b));
        if (next.size() > opt.max_all) {
          T.closed_under_union = false;
          break;
        }
      }
    if (!T.closed_under_union) break;
    layer.assign(next.begin(), next.end());
  }
  T.all = layer;
  std::sort(T.all.begin(), T.all.end(), TypeLess{});
  return T;
}

}  // namespace tdl
