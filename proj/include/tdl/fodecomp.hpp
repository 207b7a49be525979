#pragma once

#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// Level formulas read td_{=j+1} / td_{=j} inside the residual component of x
// (Component) or on the whole residual structure (Global).
enum class LevelReading { Component, Global };

struct DecompFormulas {
  int d = 0;
  LevelReading reading = LevelReading::Component;
  std::vector<Formula> phi;  // phi[i](x), i = 0..d, phi[0] = false
  std::vector<Formula> psi;  // psi[i](x, y), i = 0..d, psi[0] = true
  Formula eps;               // eps(x, y)
  Formula alpha;             // alpha(x, y): class of y is a child of class of x
};

DecompFormulas build_decomp_formulas(const Signature& sig, int d, LevelReading reading = LevelReading::Component);

struct TreeDecomposition {
  std::vector<std::vector<int>> classes;  // sorted by (level, least element)
  std::vector<int> class_of;              // per element
  std::vector<int> parent;                // per class, -1 at level 1
  std::vector<int> level;                 // per class, 1-based
  std::vector<int> bag(int c) const;      // the class and all its ancestors
  int height() const;
  bool operator==(const TreeDecomposition&) const = default;
};

// sorts classes and remaps parent indices
TreeDecomposition normalized(TreeDecomposition T);

struct Decomposition {
  TreeDecomposition td;
  bool formula_path = false;  // the formula path ran and agreed
  bool direct_path = true;
};

// Roots of every residual component, level by level.
TreeDecomposition decompose_direct(const Structure& A, int d);
// Quotient by eps, tree by alpha; throws DomainError if eps is not an
// equivalence or a class lacks a level or a unique parent.
TreeDecomposition decompose_formulas(const Structure& A, const DecompFormulas& F);
// Both paths; a disagreement is an internal error (std::logic_error).
Decomposition decompose(const Structure& A, int d, bool formula_path = true);

struct DecompReport {
  bool ok = true;
  std::vector<std::string> failures;
};
// with_formulas: also check eps against the classes and alpha invariance
DecompReport verify_decomposition(const Structure& A, const TreeDecomposition& T, int d, bool with_formulas = true);

std::string decomposition_json(const TreeDecomposition& T);

}  // namespace tdl
