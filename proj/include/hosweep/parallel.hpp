// Minimal worker-pool helper for per-ordinate parallelism.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hosweep {

/// Worker cap: HOSWEEP_THREADS if set, otherwise hardware concurrency.
inline int max_workers() {
    if (const char* env = std::getenv("HOSWEEP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, n). Tasks must write to disjoint state; results do
/// not depend on the schedule. The first exception is rethrown on the caller.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(n, max_workers());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace hosweep
