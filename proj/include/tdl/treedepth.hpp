#pragma once

#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// Exact tree-depth of the Gaifman graph. td(empty) = 0.
int tree_depth(const Structure& A);
// Tree-depth of the subgraph induced on `mask` (n <= 64).
int tree_depth_masks(const std::vector<uint64_t>& adj, uint64_t mask);

// {r : td(A \ r) <= td(A) - 1}; the single element for singletons.
std::vector<int> roots_of(const Structure& A);

}  // namespace tdl
