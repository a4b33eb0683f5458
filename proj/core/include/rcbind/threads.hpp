#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rcbind {

// Runs fn(i) for i in [0,n) across up to n_threads workers (0 = hardware
// concurrency). Each index writes only its own output slot, so results are
// identical for any thread count.
inline void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = n_threads > 0 ? static_cast<std::size_t>(n_threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([=, &fn]() {
            for (std::size_t i = t; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rcbind
