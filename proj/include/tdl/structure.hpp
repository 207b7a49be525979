#pragma once

#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdl/common.hpp"

namespace tdl {

struct Symbol {
  std::string name;
  int arity = 1;
  bool operator==(const Symbol&) const = default;
};

class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Symbol> syms);

  const std::vector<Symbol>& symbols() const { return syms_; }
  int size() const { return static_cast<int>(syms_.size()); }
  const Symbol& operator[](int i) const { return syms_[i]; }
  int index(std::string_view name) const;  // -1 if absent
  bool contains(std::string_view name) const { return index(name) >= 0; }
  int max_arity() const;
  bool operator==(const Signature& o) const { return syms_ == o.syms_; }

  // sigma-tilde: R__{i1,...,im} of arity m for every nonempty I of [1,ar(R)].
  Signature expand() const;
  Signature with(const Symbol& s) const;

  std::string str() const;                        // "E:2,R:1"
  static Signature parse_spec(std::string_view);  // inverse of str()

 private:
  std::vector<Symbol> syms_;
};

// Name of R_I and its inverse; I is 1-based and sorted.
std::string expanded_name(const std::string& base, const std::vector<int>& idx);
bool split_expanded_name(const std::string& name, std::string* base, std::vector<int>* idx);

using Tuple = std::vector<int>;
using AtomicType = std::set<std::string>;

struct Structure {
  Signature sig;
  int n = 0;
  std::vector<std::vector<Tuple>> rel;  // per symbol, sorted and unique
  std::optional<std::vector<int>> order;  // ascending element list

  Structure() = default;
  Structure(Signature s, int size);

  bool ordered() const { return order.has_value(); }
  bool holds(int sym, const Tuple& t) const;
  void add(int sym, Tuple t);
  void add(std::string_view sym, Tuple t);
  void normalize();  // sort and dedupe every relation
  void validate() const;
  int tuple_count() const;
  // Positions in the order: pos[e] = rank of e.
  std::vector<int> order_rank() const;

  bool operator==(const Structure& o) const;
};

struct SubStructure {
  Structure s;
  std::vector<int> to_parent;  // element i of s is to_parent[i] in the parent
};

// text format
std::string to_text(const Structure& A);
Structure parse_structure(std::string_view text);
Structure load_structure(const std::string& path);
void save_structure(const Structure& A, const std::string& path);

// Gaifman graph
std::set<std::pair<int, int>> gaifman_edges(const Structure& A);
std::vector<std::vector<int>> gaifman_adjacency(const Structure& A);
std::vector<uint64_t> gaifman_masks(const Structure& A);  // n <= 64

std::vector<SubStructure> components(const Structure& A);
std::vector<int> component_ids(const Structure& A);
bool is_connected(const Structure& A);

constexpr int kInfinity = std::numeric_limits<int>::max();
int distance(const Structure& A, int a, int b);

SubStructure induced(const Structure& A, const std::vector<int>& elems);
SubStructure remove_and_expand(const Structure& A, int r);
// Inverse of remove_and_expand: B over expand(sig) plus a new element with
// atomic type alpha; the new element gets index B.n.
Structure add_root(const Structure& B, const Signature& sig, const AtomicType& alpha);
// Forget the R_I with I != [1,ar(R)].
Structure forget_expansion(const Structure& B, const Signature& sig);

AtomicType atomic_type(const Structure& A, int a);
std::string atomic_type_str(const AtomicType& a);
// All atomic types over sig in the fixed order.
std::vector<AtomicType> all_atomic_types(const Signature& sig);

Structure disjoint_union(const Structure& A, const Structure& B);
Structure ordered_sum(const Structure& A, const Structure& B);
Structure with_order(const Structure& A, std::vector<int> order);
Structure without_order(const Structure& A);
Structure relabel(const Structure& A, const std::vector<int>& perm);  // new index of e is perm[e]

// Canonical string, equal exactly for isomorphic unordered structures.
std::string canonical_form(const Structure& A);

}  // namespace tdl
