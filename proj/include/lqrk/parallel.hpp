#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lqrk {

// Worker-thread cap: LQRK_THREADS env var, 0 or unset = hardware concurrency.
inline unsigned worker_threads() {
    if (const char* env = std::getenv("LQRK_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

// Runs fn(i) for i in [0, count), chunked over worker threads.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    unsigned nt = worker_threads();
    if (nt <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, count));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned w = 0; w < nt; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += nt) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace lqrk
