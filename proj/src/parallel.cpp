#include "lglab/parallel.hpp"

#include <omp.h>

#include <cstdlib>

namespace lglab {

int configure_threads_from_env() {
  if (const char* env = std::getenv("LGLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0 && cap < omp_get_max_threads()) {
      omp_set_num_threads(cap);
    }
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace lglab
