#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "anmimo/common.hpp"

namespace anmimo {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0, count) on `threads` workers, contiguous blocks.
// fn must only write to per-index state; reductions happen afterwards in
// index order so the outcome is independent of the partition.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (threads > count) threads = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t lo = static_cast<std::uint64_t>(t) * chunk;
        const std::uint64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::uint64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Mean and standard error of per-trial values, reduced in trial order.
template <typename Fn>
MCEstimate mc_reduce(std::uint64_t trials, std::uint64_t seed, unsigned threads, Fn&& per_trial) {
    std::vector<double> values(trials);
    parallel_for(trials, threads, [&](std::uint64_t i) { values[i] = per_trial(i); });
    double mean = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) mean += values[i];
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const double d = values[i] - mean;
        ss += d * d;
    }
    MCEstimate est;
    est.mean = mean;
    est.trials = trials;
    est.seed = seed;
    est.std_err = trials >= 2
                      ? std::sqrt(ss / (static_cast<double>(trials) - 1.0) / static_cast<double>(trials))
                      : 0.0;
    return est;
}

}  // namespace anmimo
