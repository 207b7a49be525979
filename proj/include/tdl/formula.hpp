#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tdl/common.hpp"

namespace tdl {

enum class Kind {
  True,
  False,
  Atom,     // name(args)
  Eq,       // args[0] = args[1]
  Leq,      // args[0] <= args[1]
  SetAtom,  // name(args[0]), name a set variable
  Not,
  And,
  Or,
  Implies,
  Exists,     // name = bound variable
  Forall,
  ExistsSet,  // name = bound set variable
  ForallSet,
  ExistsMod,  // exists^{i mod p} name
};

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  std::string name;
  std::vector<std::string> args;
  std::vector<Formula> kids;
  int i = 0, p = 1;
};

inline bool is_quantifier(Kind k) {
  return k == Kind::Exists || k == Kind::Forall || k == Kind::ExistsSet || k == Kind::ForallSet ||
         k == Kind::ExistsMod;
}
inline bool is_atomic(Kind k) {
  return k == Kind::True || k == Kind::False || k == Kind::Atom || k == Kind::Eq || k == Kind::Leq ||
         k == Kind::SetAtom;
}

// Fresh variable names v0, v1, ...; the counter is owned by the caller.
struct Fresh {
  int next = 0;
  std::string var() { return "v" + std::to_string(next++); }
  std::string set_var() { return "V" + std::to_string(next++); }
};

// constructors; conj/disj flatten nested And/Or and drop neutral constants
Formula f_true();
Formula f_false();
Formula atom(std::string rel, std::vector<std::string> args);
Formula eq(std::string x, std::string y);
Formula neq(std::string x, std::string y);
Formula leq(std::string x, std::string y);
Formula set_atom(std::string X, std::string x);
Formula neg(Formula f);
Formula conj(std::vector<Formula> fs);
Formula disj(std::vector<Formula> fs);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula exists(std::string x, Formula f);
Formula forall(std::string x, Formula f);
Formula exists(const std::vector<std::string>& xs, Formula f);
Formula forall(const std::vector<std::string>& xs, Formula f);
Formula exists_set(std::string X, Formula f);
Formula forall_set(std::string X, Formula f);
Formula exists_mod(int i, int p, std::string x, Formula f);
// raw node, no simplification (parser)
Formula make_node(Kind k, std::string name, std::vector<std::string> args, std::vector<Formula> kids,
                  int i = 0, int p = 1);

// parse / render
Formula parse_formula(std::string_view text, const std::set<std::string>& free_set_vars = {});
std::string render(const Formula& f);

enum class Logic { FO, FOMOD, MSO, MSOMOD };
Logic logic_of(const Formula& f);
std::string logic_name(Logic l);

struct Metrics {
  int qr = 0;
  int qad = 0;
  uint64_t size = 0;  // node count of the tree (saturating)
};
Metrics metrics(const Formula& f);
int quantifier_rank(const Formula& f);
int alternation_depth(const Formula& f);
uint64_t formula_size(const Formula& f);
size_t dag_size(const Formula& f);

Formula to_nnf(const Formula& f);

std::set<std::string> free_vars(const Formula& f);      // first-order
std::set<std::string> free_set_vars(const Formula& f);  // second-order
std::set<std::string> relation_names(const Formula& f);
bool uses_order(const Formula& f);

// Capture-avoiding renaming of free first-order variables.
Formula rename_free(const Formula& f, const std::map<std::string, std::string>& ren, Fresh& fresh);

// Every first-order (and modulo) quantifier bound to x is guarded by
// guard[z := x]. Variables of the guard other than z stay free.
Formula relativise(const Formula& f, const Formula& guard, const std::string& z, Fresh& fresh);

class Signature;
// Sentence over expand(sig) -> formula over sig with free variable z.
Formula interpret_removed(const Formula& f, const Signature& sig, const std::string& z, Fresh& fresh);

}  // namespace tdl
