#ifndef PASGUIDE_PARALLEL_HPP
#define PASGUIDE_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace pasguide {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
// be independent; results must not depend on scheduling.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = std::min(threads, count);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pasguide

#endif
