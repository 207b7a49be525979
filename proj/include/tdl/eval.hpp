#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/structure.hpp"

namespace tdl {

struct Env {
  std::map<std::string, int> fo;
  std::map<std::string, uint64_t> so;  // bitmask over the universe
};

// "x=3,X={0,1}"
Env parse_env(const std::string& text);

// Compiles a formula once and evaluates it on many structures. Memo tables
// live only for the duration of one eval call.
class Evaluator {
 public:
  explicit Evaluator(const Formula& f);
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  bool eval(const Structure& A, const Env& env = {}) const;
  // one structure, many assignments; memo tables are shared across them
  std::vector<bool> eval_batch(const Structure& A, const std::vector<Env>& envs) const;
  const std::vector<std::string>& free_fo() const;
  const std::vector<std::string>& free_so() const;
  size_t compiled_nodes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool eval(const Structure& A, const Formula& f, const Env& env = {});

// Direct recursive Tarski semantics, kept deliberately simple.
bool eval_naive(const Structure& A, const Formula& f, const Env& env = {});

struct InvarianceReport {
  bool invariant = true;
  std::vector<int> order1, order2;  // disagreeing orders when not invariant
  uint64_t orders_checked = 0;
};
InvarianceReport check_order_invariance(const Structure& A, const Formula& f);

struct FindModelOptions {
  int min_size = 0;
  int max_size = 4;
  int td_bound = -1;
  bool ordered = false;
  bool graph_mode = false;
};
std::optional<Structure> find_model(const Formula& f, const Signature& sig, const FindModelOptions& opt);

}  // namespace tdl
