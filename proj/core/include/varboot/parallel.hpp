#pragma once

#include <cstddef>
#include <functional>

namespace varboot {

/// Worker count: min(VAR_BOOT_THREADS, hardware threads); at least 1.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work is chunked over `threads` std::threads
/// (0 = worker_count()). Bodies must write only to their own index slots;
/// the result layout is then independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace varboot
