#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

// (L,q)-types as interned trees: the atomic diagram of the parameters plus the
// set of child types one level down, one per element (and, for MSO, per set)
// extension. Two ids are equal iff the types are equal.
using TypeId = int32_t;

struct TypeNode {
  int ctx = 0;   // signature, ordered flag, logic
  int q = 0;
  int k = 0;     // element parameters
  int m = 0;     // set parameters
  std::string base;            // one byte per atom, layout fixed by (ctx,k,m)
  std::vector<TypeId> elem;    // sorted, unique
  std::vector<TypeId> sets;    // MSO only
  uint64_t hash = 0;           // structural, independent of interning order
};

struct TypeCtx {
  Signature sig;
  bool ordered = false;
  Logic logic = Logic::FO;  // FO or MSO
};

int type_ctx(const Signature& sig, bool ordered, Logic L);
const TypeCtx& type_ctx_info(int ctx);
const TypeNode& type_node(TypeId t);
int type_q(TypeId t);
std::string type_hash(TypeId t);  // 16 hex digits
size_t type_store_size();

// tp_{L,q}(A, elems, sets) by unravelling the EF game. L is FO or MSO; the
// structure's order (if any) becomes part of the type.
TypeId tp(Logic L, int q, const Structure& A, const std::vector<int>& elems = {},
          const std::vector<uint64_t>& sets = {});
// Same type, but assembled from the components: valid for unordered and for
// component-ordered structures (Composition Lemma).
TypeId tp_by_components(Logic L, int q, const Structure& A);
// Unordered type through root removal (Lemma 24) and composition.
TypeId tp_recursive(Logic L, int q, const Structure& A);

TypeId empty_type(int ctx, int q);
TypeId truncate_type(TypeId t, int q);

// Type of the disjoint union (unordered ctx) or ordered sum (ordered ctx) of
// parameter-free structures of types a and b.
TypeId compose(TypeId a, TypeId b);
TypeId compose_power(TypeId a, int n);

// Type of the structure obtained by adding a root r with atomic type alpha in
// front of a structure of type theta over expand(sig) (the inverse of A^[r]).
// In an ordered ctx r becomes the minimum.
TypeId add_root_type(const Signature& sig, const AtomicType& alpha, TypeId theta);

// <0, 0, >0. A fixed total order: structural, lexicographic on
// (q, k, m, base, sorted element children, sorted set children).
int type_compare(TypeId a, TypeId b);
// shorter first, then lexicographic on sorted names
int atomic_compare(const AtomicType& a, const AtomicType& b);

struct TypeLess {
  bool operator()(TypeId a, TypeId b) const { return type_compare(a, b) < 0; }
};

// Does the type satisfy the sentence? Needs qr(phi) <= q and no modulo
// quantifiers; phi may use <= only over ordered contexts.
bool eval_on_type(const Formula& phi, TypeId t);

// least n >= 1 with t^n = t^(n+1)
int stabilization_threshold(TypeId t, int max_n = 64);
// least p >= 1 with t^p = t^(2p) for every t in the list
int pumping_period(const std::vector<TypeId>& types, int max_p = 256);

// Closure of the generators under compose, up to max_size entries.
struct SemigroupClosure {
  std::vector<TypeId> elements;  // sorted by type_compare
  bool closed = false;
};
SemigroupClosure compose_closure(const std::vector<TypeId>& generators, size_t max_size = 20000);

// Induced substructure with the same unordered (L,q)-type.
SubStructure shrink_model(const Structure& A, Logic L, int q);

}  // namespace tdl
