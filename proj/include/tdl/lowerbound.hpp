#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// Coloured trees and forests live over {E/2, R/1, B/1}; E points away from
// the root, R and B partition the nodes.
Signature lower_sig();

enum class Colour { Red, Blue };

// root of every tree of a forest, in index order; throws InputError if the
// E-relation is not a directed forest
std::vector<int> forest_roots(const Structure& F);
// parent[v], -1 at roots
std::vector<int> forest_parents(const Structure& F);
// max number of nodes on a root-leaf path (0 for the empty forest)
int forest_height(const Structure& F);

Structure enc(uint64_t n, Colour c = Colour::Red);
// bottom-up deduplication of isomorphic sibling subtrees; the result takes the
// colour of the root
Structure num(const Structure& T);
// T must satisfy num(T) = T (no two isomorphic siblings)
uint64_t decode(const Structure& T);
// subtree of F below v, v becomes node 0
Structure subtree(const Structure& F, int v);

// d-EXP(0); refuses d > 5
uint64_t tower(int d);

enum class EqVariant { Linear, Naive };
// eq_d(x, y) over {E}: correct at tree roots of forests of height <= d.
Formula build_eq(int d, const std::string& x, const std::string& y, Fresh& fresh,
                 EqVariant variant = EqVariant::Linear);

Formula build_conn(const std::string& M, Fresh& fresh);
Formula build_root_in(const std::string& x, const std::string& M, Fresh& fresh);
Formula build_phi_lower(int d, EqVariant variant = EqVariant::Linear);

// T_d: complete k-ary tree of height d, k = max(1, tower(d) - 1), all blue
Structure build_witness_tree(int d, int max_d = 3);
// F_d: red enc(0) .. enc(tower(d) - 1); F_d^n adds n copies of T_d
Structure build_family(int d, int n, int max_d = 3);

// does P map into T with root to root, children injectively to children?
bool embeds_at_root(const Structure& P, const Structure& T);

}  // namespace tdl
