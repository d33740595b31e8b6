#include "rdot/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace rdot::par {

namespace {
std::atomic<int> g_override{0};
}

int thread_count() {
  const int forced = g_override.load(std::memory_order_relaxed);
  if (forced > 0) return forced;
  if (const char* env = std::getenv("RDOT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

void set_thread_count(int n) { g_override.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace rdot::par
