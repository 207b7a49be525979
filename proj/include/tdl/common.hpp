#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tdl {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SyntaxError : std::runtime_error {
  SyntaxError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos(pos) {}
  size_t pos;
};

// Soft wall-clock budget. TDLL_BUDGET_MS is read once; 0 means unlimited.
namespace budget {
void reset();
void set_ms(int64_t ms);
int64_t limit_ms();
// Throws BudgetError once the deadline has passed. Cheap enough for inner loops
// since the clock is only consulted every few thousand calls.
void check();
}  // namespace budget

uint64_t fnv1a(const void* data, size_t len, uint64_t h = 1469598103934665603ull);
inline uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ull) {
  return fnv1a(s.data(), s.size(), h);
}
inline uint64_t hash_mix(uint64_t h, uint64_t v) { return fnv1a(&v, sizeof v, h); }
std::string hex64(uint64_t v);

}  // namespace tdl
