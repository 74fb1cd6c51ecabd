#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wmterrain {

/// Calls body(k) for every k in [0, count) on up to `workers` threads.
/// Work items are claimed dynamically, so callers must make body(k) write
/// only to slot k. The first exception thrown is rethrown on the caller.
template<typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body)
{
    if (workers <= 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k)
            body(k);
        return;
    }
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= count)
                    return;
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

inline unsigned default_workers()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace wmterrain
