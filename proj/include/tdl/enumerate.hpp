#pragma once

#include <functional>
#include <vector>

#include "tdl/structure.hpp"

namespace tdl {

struct EnumOptions {
  int min_size = 0;
  int max_size = 4;
  int td = -1;  // bound on tree-depth, -1 for none
  bool connected = false;
  bool graph_mode = false;  // binary symbols symmetric and irreflexive
};

// One representative per isomorphism class, ascending size, deterministic.
std::vector<Structure> enum_structures(const Signature& sig, const EnumOptions& opt);
// Streaming form; return false from the callback to stop.
void enum_structures(const Signature& sig, const EnumOptions& opt, const std::function<bool(const Structure&)>& cb);

// All n! ordered expansions, lexicographic by permutation.
void enum_orders(const Structure& A, const std::function<bool(const Structure&)>& cb);
std::vector<Structure> all_orders(const Structure& A);

}  // namespace tdl
