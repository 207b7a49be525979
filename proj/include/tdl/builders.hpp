#pragma once

#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// phi_E(x,y): x != y and some tuple contains both. Existential.
Formula build_gaifman_adjacency(const Signature& sig, const std::string& x, const std::string& y, Fresh& fresh);

// dist_{<=l}(x,y), built by halving so the size stays linear in l.
Formula build_dist_leq(const Signature& sig, int l, const std::string& x, const std::string& y, Fresh& fresh);
Formula build_reach(const Signature& sig, int d, const std::string& x, const std::string& y, Fresh& fresh);

enum class TdMode { Inductive, Universal };

// td_{<=d}. Universal mode searches subgraph-minimal obstructions up to cap
// vertices (cap < 0: default 2^(d+1)) and refuses if cap is below the known
// size bound 2^(2^(d-1)).
Formula build_td_leq(const Signature& sig, int d, Fresh& fresh, TdMode mode = TdMode::Inductive, int cap = -1);
Formula build_td_gt(const Signature& sig, int d, Fresh& fresh, TdMode mode = TdMode::Inductive);
// td_{=j} := td_{<=j} & !td_{<=j-1}; td_{=0} means empty.
Formula build_td_eq(const Signature& sig, int j, Fresh& fresh, TdMode mode = TdMode::Inductive);

// Universal mode where the obstruction search is cheap (d <= 2), inductive above.
TdMode preferred_td_mode(int d);

// Obstructions used by the universal mode, as graphs on {E/2}.
std::vector<Structure> td_obstructions(int d, int cap = -1);

Formula build_roots(const Signature& sig, int d, const std::string& x, Fresh& fresh);
Formula build_atomic(const Signature& sig, const AtomicType& alpha, const std::string& x);

}  // namespace tdl
