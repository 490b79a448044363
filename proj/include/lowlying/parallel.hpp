#pragma once
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace lowlying {

// Runs fn(i) for i in [0, n) on `threads` workers. Results land in a vector
// indexed by i, so any later reduction happens in index order and the output
// is identical for every thread count.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
    std::vector<T> out(n);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            out[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned k = threads < n ? threads : static_cast<unsigned>(n);
    pool.reserve(k);
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

} // namespace lowlying
