#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sbfw {

/// Worker count when the caller does not pin one.
inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls body(i) for every i in [0, count) on up to `workers` threads.
/// Indices are handed out dynamically; body must only write state owned by
/// its index. The first exception thrown by any call is rethrown here.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> threads;
        const std::size_t n_threads = std::min<std::size_t>(workers, count);
        threads.reserve(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w) {
            threads.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next.store(count);
                        return;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace sbfw
