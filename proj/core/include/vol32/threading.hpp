#pragma once

#include <cstddef>
#include <functional>

namespace vol32 {

/// Number of worker threads to use for parallel work. Resolution order:
///  1. explicit `requested` argument if > 0
///  2. VOL32_THREADS environment variable if set and > 0
///  3. std::thread::hardware_concurrency(), floored at 1
std::size_t resolve_threads(std::size_t requested = 0);

/// Run fn(block_index) for block_index in [0, n_blocks), distributing
/// blocks over `n_threads` threads. Blocks are assigned round-robin so the
/// decomposition (and hence any block-keyed RNG stream) is independent of
/// the thread count. Exceptions from workers are rethrown on the caller.
void parallel_for_blocks(std::size_t n_blocks, std::size_t n_threads,
                         const std::function<void(std::size_t)>& fn);

}  // namespace vol32
