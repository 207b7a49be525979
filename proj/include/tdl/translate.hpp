#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"
#include "tdl/types.hpp"

namespace tdl {

using CountVec = std::vector<int>;
using ModVec = std::pair<CountVec, CountVec>;  // (capped at p, residue mod p)

// per sentence: number of components satisfying it
CountVec count_components(const Structure& A, const std::vector<Formula>& phis);
CountVec cap_vec(const CountVec& v, int t);
CountVec mod_vec(const CountVec& v, int p);

// A |= result iff [n_Phi(A)]_t is in R, on structures of td <= d.
Formula count_formula(const Signature& sig, const std::vector<Formula>& phis, const std::set<CountVec>& R, int t,
                      int d, Fresh& fresh);
// A |= result iff ([n]_p, [n] mod p) is in R, provided every component has at
// most b roots.
Formula mod_count_formula(const Signature& sig, const std::vector<Formula>& phis, const std::set<ModVec>& R, int p,
                          int d, int b, Fresh& fresh);

enum class Pipeline { OIFO, MSO, OIMSO };
enum class ThresholdMode { Empirical, Paper };
// Where the modulo pipeline takes its period from: the type semigroup, or the
// minimal automaton of the sentence (words only, d = 1). Auto: automaton at d = 1.
enum class PeriodSource { Auto, Types, Automaton };
std::string pipeline_name(Pipeline p);
Pipeline parse_pipeline(const std::string& s);

struct TranslateOptions {
  int d = 2;
  int max_size = 5;          // connected universe at the top level
  bool graph_mode = false;   // top-level binary symbols symmetric, irreflexive
  ThresholdMode mode = ThresholdMode::Empirical;
  int b = -1;                // root-count bound, -1: measured
  PeriodSource period = PeriodSource::Auto;
  size_t max_vectors = 400000;
};

// One level of the recursion: connected structures over expand^j(sigma) of
// td <= d - j, their types, and the definers emitted for them.
struct Level {
  Signature sig;
  int td = 0;
  std::vector<Structure> universe;
  std::vector<TypeId> conn;      // sorted
  std::vector<Structure> reps;   // smallest representative per conn type
  std::vector<int> thresholds;   // per conn type, -1 if none
  int t = 0, p = 0, b = 0;
  std::vector<Formula> definers;  // per conn type
  // all types of unions (for the level above), with their count sets
  std::vector<TypeId> full;
  std::vector<std::set<CountVec>> full_R;
  std::vector<std::set<ModVec>> full_RM;
  std::vector<Formula> full_definers;
};

struct TranslateResult {
  Pipeline kind = Pipeline::OIFO;
  Formula psi;
  int q = 0, d = 0, t = 0, p = 0, b = 0;
  size_t conn_types = 0;
  size_t R_size = 0;
  std::string period_source;  // oimso: "types" or "automaton"
  int dfa_states = 0;
  Metrics m;
  std::vector<Level> levels;
};

// Per-level threshold: Empirical is the largest stabilization index of the
// connected types; Paper is 2^q + 1 (ordered FO) or 2^(kq) with k the largest
// shrunk representative (MSO).
int threshold(ThresholdMode mode, Pipeline kind, int q, const Level& lv);

// R for a predicate on types: every count vector whose composed type passes.
std::set<CountVec> compute_R(const std::function<bool(TypeId)>& target, const std::vector<TypeId>& conn, int t);
std::set<ModVec> compute_R_mod(const std::function<bool(TypeId)>& target, const std::vector<TypeId>& conn, int p);
// type of the union (ordered sum in sorted order) with the given counts
TypeId type_of_counts(const std::vector<TypeId>& conn, const CountVec& n);

TranslateResult translate(Pipeline kind, const Formula& phi, const Signature& sig, const TranslateOptions& opt);
TranslateResult translate_oifo(const Formula& phi, const Signature& sig, const TranslateOptions& opt);
TranslateResult translate_mso(const Formula& phi, const Signature& sig, const TranslateOptions& opt);
TranslateResult translate_oimso(const Formula& phi, const Signature& sig, const TranslateOptions& opt);

struct VerifyReport {
  bool ok = true;
  uint64_t checked = 0;
  int max_size = 0;
  std::optional<Structure> mismatch;
  uint64_t mismatch_index = 0;
  bool phi_value = false, psi_value = false;
};
// Every structure of td <= d up to max_size: psi against phi (phi on the
// q-ordered expansion when ordered_side).
VerifyReport verify_equivalence(const Formula& phi, const Formula& psi, const Signature& sig, int d, int max_size,
                                bool ordered_side, bool graph_mode = false);

// max |roots| over connected td <= d structures up to max_size
int measured_root_bound(const Signature& sig, int d, int max_size, bool graph_mode);

}  // namespace tdl
