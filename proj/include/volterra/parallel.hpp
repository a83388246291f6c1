#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace volterra {

// 0 means std::thread::hardware_concurrency(); 1 runs everything on the calling thread.
void set_worker_count(int workers);
int worker_count();

// True on threads started by parallel_for; nested calls then run inline.
bool& in_parallel_region();

// Runs body(i) for i in [0, n). Work is handed out in index order; results must be
// written to per-index slots so that the outcome does not depend on scheduling.
template <class Body>
void parallel_for(int n, Body&& body) {
    const int w = in_parallel_region() ? 1 : std::min(worker_count(), n);
    if (w <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    auto run = [&] {
        const bool outer = in_parallel_region();
        in_parallel_region() = true;
        struct Reset {
            bool v;
            ~Reset() { in_parallel_region() = v; }
        } reset{outer};
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lk(m);
                if (!err) err = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < w; ++k) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace volterra
