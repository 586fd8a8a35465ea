#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace psg {

// Global worker-count override (0 = hardware concurrency). Set once by the
// CLI before any computation; not synchronized.
inline int& thread_override() {
    static int v = 0;
    return v;
}

inline int worker_count() {
    int n = thread_override();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over disjoint index ranges. Each range writes to its
// own slots only, so results do not depend on the worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    std::size_t workers = static_cast<std::size_t>(worker_count());
    if (workers <= 1 || n < 2 * workers) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace psg
