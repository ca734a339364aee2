#include "vol32/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace vol32 {

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VOL32_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

void parallel_for_blocks(std::size_t n_blocks, std::size_t n_threads,
                         const std::function<void(std::size_t)>& fn) {
    if (n_blocks == 0) return;
    if (n_threads <= 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    if (n_threads > n_blocks) n_threads = n_blocks;

    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::exception_ptr first_error;
    std::atomic_flag error_latch = ATOMIC_FLAG_INIT;

    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t b = t; b < n_blocks; b += n_threads) {
                try {
                    fn(b);
                } catch (...) {
                    if (!error_latch.test_and_set())
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vol32
