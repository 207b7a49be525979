#pragma once

#include <map>
#include <string>
#include <vector>

#include "tdl/structure.hpp"
#include "tdl/types.hpp"

namespace tdl {

struct QOrder {
  std::vector<int> order;  // ascending element list
  TypeId type = -1;        // tp_q of (A, order)
  // connected, |A| > 1 only
  int root = -1;
  AtomicType alpha;
  TypeId rtp = -1;         // tp_q of (A^[root], order restricted)
};

// Deterministic (L,q)-order. Ties: recursive type, then canonical form of
// A^[r] (components: of the component), then element index.
QOrder q_order_full(Logic L, int q, const Structure& A);
Structure q_order(Logic L, int q, const Structure& A);

// Checks the definition literally on (A, order). The quantification over all
// q-orders of A^[r'] uses one constructed q-order per r'.
bool is_q_order(Logic L, int q, const Structure& A);

TypeId tp_ordered(Logic L, int q, const Structure& A);
// throws DomainError on singletons and disconnected input
TypeId rtp(Logic L, int q, const Structure& A);

struct TypeEntry {
  TypeId type = -1;
  Structure rep;   // smallest representative found (unordered)
  int threshold = 0;
};

// Types of td <= d structures up to max_size elements, connected view plus
// the closure under disjoint union / ordered sum of the connected types.
struct TypeTable {
  Signature sig;
  Logic logic = Logic::FO;
  int q = 0, d = 0;
  bool ordered = false;
  std::vector<TypeEntry> conn;  // sorted by type_compare
  std::vector<TypeId> all;      // sorted by type_compare
  bool closed_under_union = false;
  int structures_seen = 0;
};

struct TableOptions {
  int max_size = 4;
  bool graph_mode = false;
  size_t max_all = 20000;
};
TypeTable realized_types(const Signature& sig, Logic L, int q, int d, bool ordered, const TableOptions& opt);

}  // namespace tdl
