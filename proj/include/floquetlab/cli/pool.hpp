#pragma once

#include <cstddef>
#include <functional>

namespace floquetlab::cli {

// Environment variable capping the number of workers.
inline constexpr const char* kMaxThreadsEnv = "FLOQUETLAB_MAX_THREADS";

// requested = 0 means one worker per hardware thread. The result is capped
// by FLOQUETLAB_MAX_THREADS when set and is always >= 1.
std::size_t resolve_threads(std::size_t requested);

// Calls task(i) for i in [0, count) on up to `threads` workers. Tasks must
// write only to their own slot; the first exception by index is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace floquetlab::cli
