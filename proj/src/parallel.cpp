#include "mu3/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace mu3 {

int thread_count() {
  static const int count = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("MU3_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap > 0) n = std::min(n, cap);
      } catch (const std::exception&) {
      }
    }
    return std::max(n, 1);
  }();
  return count;
}

}  // namespace mu3
