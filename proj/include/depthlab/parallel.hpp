#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace depthlab {

/// Worker count from DEPTHLAB_THREADS, else 1. Overridable at runtime.
int default_threads();
void set_default_threads(int threads);

/// Runs body(i) for i in [0, count). Work items must only write to their own
/// slots; results therefore do not depend on the worker count. The exception
/// from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int threads = default_threads());

}  // namespace depthlab
