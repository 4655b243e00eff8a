#include "nfv/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace nfv {

namespace {

int from_environment() {
  const char* raw = std::getenv("NFV_THREADS");
  if (raw == nullptr) {
    return omp_get_max_threads();
  }
  try {
    int n = std::stoi(raw);
    if (n > 0) {
      return n;
    }
  } catch (const std::exception&) {
  }
  return omp_get_max_threads();
}

int& cached() {
  static int n = from_environment();
  return n;
}

}  // namespace

int worker_count() { return cached(); }

void set_worker_count(int n) { cached() = n > 0 ? n : omp_get_max_threads(); }

}  // namespace nfv
