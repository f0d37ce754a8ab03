#pragma once

#include <thread>
#include <vector>

namespace classimap::detail {

/// Runs fn(worker_index) on `workers` threads. Callers split work by a fixed
/// rule on the worker index and reduce partial results in index order, which
/// keeps results deterministic for any fixed worker count.
template <typename Fn>
void fan_out(int workers, Fn&& fn) {
    if (workers <= 1) {
        fn(0);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) threads.emplace_back(fn, w);
    fn(0);
    for (auto& t : threads) t.join();
}

} // namespace classimap::detail
