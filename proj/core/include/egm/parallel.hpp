#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace egm {

/// Process-wide worker cap (CLI --threads). 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Each index is touched
/// by exactly one worker, so output written per-index is bitwise independent
/// of the worker count. Reductions belong in a separate ordered pass.
/// The first exception thrown by a worker is rethrown on the caller.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    int workers = max_threads();
    if (workers <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    workers = int(std::min<std::size_t>(std::size_t(workers), n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t b = std::min(n, std::size_t(w) * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e]() {
            try {
                fn(b, e);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace egm
