#include "tdl/common.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>

namespace tdl {

namespace budget {
namespace {
using Clock = std::chrono::steady_clock;
std::atomic<int64_t> g_limit{-1};
Clock::time_point g_start = Clock::now();
std::atomic<uint32_t> g_tick{0};

int64_t env_limit() {
  const char* e = std::getenv("TDLL_BUDGET_MS");
  if (!e || !*e) return 0;
  return std::atoll(e);
}
}  // namespace

void reset() { g_start = Clock::now(); }

void set_ms(int64_t ms) {
  g_limit = ms;
  reset();
}

int64_t limit_ms() {
  if (g_limit < 0) g_limit = env_limit();
  return g_limit;
}

void check() {
  if ((++g_tick & 0xfff) != 0) return;
  int64_t lim = limit_ms();
  if (lim <= 0) return;
  auto el = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - g_start).count();
  if (el > lim) throw BudgetError("wall-time budget of " + std::to_string(lim) + " ms exceeded");
}
}  // namespace budget

uint64_t fnv1a(const void* data, size_t len, uint64_t h) {
  auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace tdl
