// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace glint {

int default_thread_count() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(size_t count, const std::function<void(size_t)>& fn, int n_threads) {
    if (n_threads <= 0) {
        n_threads = default_thread_count();
    }
    if (n_threads == 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) {
                return;
            }
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const size_t spawn = static_cast<size_t>(n_threads) - 1;
    pool.reserve(spawn);
    for (size_t t = 0; t < spawn; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace glint
