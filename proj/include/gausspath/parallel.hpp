#pragma once

// Deterministic parallel helpers.  Work is partitioned by index, results land
// in preassigned slots, and reductions run as a fixed pairwise tree, so the
// output is byte-identical for any worker count.

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gausspath::par {

inline int worker_count() {
    if (const char* env = std::getenv("GAUSSPATH_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// f(i) for i in [0,n), split into contiguous blocks.
template <class F>
void parallel_for(std::int64_t n, F&& f) {
    int workers = worker_count();
    if (n <= 0) return;
    if (workers == 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
    if (workers > n) workers = static_cast<int>(n);
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::int64_t lo = w * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &f] {
            for (std::int64_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : threads) t.join();
}

// Pairwise tree reduction in a fixed order independent of thread count.
template <class T>
T tree_reduce(std::vector<T> v, T zero) {
    if (v.empty()) return zero;
    while (v.size() > 1) {
        size_t half = (v.size() + 1) / 2;
        for (size_t i = 0; i + half < v.size(); ++i) v[i] = v[i] + v[i + half];
        v.resize(half);
    }
    return v[0];
}

} // namespace gausspath::par
