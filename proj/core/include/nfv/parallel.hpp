#pragma once

#include <cstddef>
#include <exception>

namespace nfv {

// Worker count for data-parallel loops. Reads NFV_THREADS once; unset or
// invalid means "let OpenMP decide".
int worker_count();

// Override for the current process (tests, CLI).
void set_worker_count(int n);

// Statically scheduled loop over [begin, end). The first exception thrown by
// any iteration is rethrown on the calling thread after the loop.
template <class Body>
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t i = begin; i < end; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(nfv_parallel_error)
      {
        if (!error) {
          error = std::current_exception();
        }
      }
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace nfv
