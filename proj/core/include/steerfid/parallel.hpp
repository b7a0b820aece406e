#pragma once

#include <cstddef>
#include <functional>

namespace steerfid {

// Worker cap: STEERFID_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
[[nodiscard]] std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to `workers` threads with a static
// contiguous partition. Exceptions from the bodies are rethrown (first one).
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace steerfid
