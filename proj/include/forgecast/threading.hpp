#pragma once

#include "forgecast/types.hpp"

#include <functional>

namespace forgecast {

/// Worker count: `requested` (0 means hardware concurrency) capped by the
/// FORGECAST_THREADS environment variable when set.
int effective_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work items must
/// be independent; the first exception is rethrown after all workers join.
void parallel_for(Index n, int threads, const std::function<void(Index)>& body);

}  // namespace forgecast
