#ifndef KWSFCM_PARALLEL_HPP
#define KWSFCM_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <utility>
#include <vector>

namespace kwsfcm {

/// Programmatic override of the worker count; 0 defers to the
/// KWSFCM_THREADS environment variable, then to hardware concurrency.
inline int& thread_override() {
    static int value = 0;
    return value;
}

inline int worker_count() {
    if (thread_override() > 0) return thread_override();
    if (const char* env = std::getenv("KWSFCM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs f(i) for i in [begin, end). Indices are block-partitioned across
/// workers; every index is computed exactly once into caller-owned storage,
/// so results are bit-identical for any worker count. Reductions stay with
/// the caller, which must perform them serially.
template <class F>
void parallel_for(int begin, int end, F&& f) {
    const int n = end - begin;
    if (n <= 0) return;
    const int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) f(i);
        return;
    }
    const int block = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        const int lo = begin + t * block;
        const int hi = std::min(end, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (int i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace kwsfcm

#endif
