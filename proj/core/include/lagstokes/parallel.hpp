#pragma once

#include <cstddef>
#include <functional>

namespace lagstokes {

/// Number of worker threads used by parallel maps. Defaults to 1.
void set_worker_count(int workers);
int worker_count();

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks,
/// one per worker. The body must only write to slots owned by index i, so
/// results do not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lagstokes
