#pragma once

namespace lglab {

/// Applies the LGLAB_THREADS cap (if set) to the OpenMP runtime. Returns
/// the thread count in effect.
int configure_threads_from_env();

int max_threads();

}  // namespace lglab
