#include "volterra/parallel.hpp"

namespace volterra {

namespace {
std::atomic<int> g_workers{0};
}

void set_worker_count(int workers) { g_workers = workers < 0 ? 0 : workers; }

bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}

int worker_count() {
    int w = g_workers.load();
    if (w > 0) return w;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

}  // namespace volterra
