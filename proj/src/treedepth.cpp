#include "tdl/treedepth.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <unordered_map>

namespace tdl {

namespace {

uint64_t component_of(const std::vector<uint64_t>& adj, uint64_t mask, int v) {
  uint64_t comp = uint64_t{1} << v, frontier = comp;
  while (frontier) {
    uint64_t next = 0;
    for (uint64_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
    next &= mask & ~comp;
    comp |= next;
    frontier = next;
  }
  return comp;
}

struct TdSolver {
  const std::vector<uint64_t>& adj;
  std::unordered_map<uint64_t, int> memo;

  int td(uint64_t mask) {
    if (!mask) return 0;
    int first = std::countr_zero(mask);
    uint64_t comp = component_of(adj, mask, first);
    if (comp != mask) {
      int best = 0;
      for (uint64_t rest = mask; rest;) {
        uint64_t c = component_of(adj, rest, std::countr_zero(rest));
        best = std::max(best, td_connected(c));
        rest &= ~c;
      }
      return best;
    }
    return td_connected(mask);
  }

  int td_connected(uint64_t mask) {
    if (std::popcount(mask) == 1) return 1;
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    budget::check();
    int best = std::popcount(mask);
    // a path on k vertices forces ceil(log2(k+1)); cheap lower bound: 2 when any edge exists
    for (uint64_t m = mask; m; m &= m - 1) {
      int v = std::countr_zero(m);
      int t = 1 + td(mask & ~(uint64_t{1} << v));
      best = std::min(best, t);
      if (best == 2) break;
    }
    memo[mask] = best;
    return best;
  }
};

std::mutex g_cache_mu;
std::map<std::vector<uint64_t>, int>& global_cache() {
  static std::map<std::vector<uint64_t>, int> c;
  return c;
}

}  // namespace

int tree_depth_masks(const std::vector<uint64_t>& adj, uint64_t mask) {
  TdSolver s{adj};
  return s.td(mask);
}

int tree_depth(const Structure& A) {
  if (A.n == 0) return 0;
  if (A.n > 64) throw DomainError("tree_depth: more than 64 elements");
  auto adj = gaifman_masks(A);
  if (A.n <= 16) {
    std::lock_guard<std::mutex> lk(g_cache_mu);
    auto it = global_cache().find(adj);
    if (it != global_cache().end()) return it->second;
  }
  uint64_t all = A.n == 64 ? ~uint64_t{0} : (uint64_t{1} << A.n) - 1;
  int t = tree_depth_masks(adj, all);
  if (A.n <= 16) {
    std::lock_guard<std::mutex> lk(g_cache_mu);
    if (global_cache().size() > 200000) global_cache().clear();
    global_cache()[adj] = t;
  }
  return t;
}

std::vector<int> roots_of(const Structure& A) {
  if (!is_connected(A)) throw DomainError("roots_of: structure is not connected");
  if (A.n == 1) return {0};
  auto adj = gaifman_masks(A);
  uint64_t all = A.n == 64 ? ~uint64_t{0} : (uint64_t{1} << A.n) - 1;
  TdSolver s{adj};
  int t = s.td(all);
  std::vector<int> out;
  for (int r = 0; r < A.n; ++r)
    if (s.td(all & ~(uint64_t{1} << r)) <= t - 1) out.push_back(r);
  return out;
}

}  // namespace tdl
