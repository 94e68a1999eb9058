#include "balance_lab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>

namespace balance_lab {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("BALANCE_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

void for_stripes(std::int64_t n, const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    int workers = std::min<std::int64_t>(worker_count(), n);
    if (workers <= 1) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t b = w * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, w, b, e] { fn(w, b, e); });
    }
    for (auto& th : pool) th.join();
}

double parallel_max(std::int64_t n, const std::function<double(std::int64_t)>& value) {
    std::vector<double> partial(static_cast<std::size_t>(worker_count()),
                                -std::numeric_limits<double>::infinity());
    for_stripes(n, [&](int w, std::int64_t b, std::int64_t e) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::int64_t i = b; i < e; ++i) m = std::max(m, value(i));
        partial[static_cast<std::size_t>(w)] = m;
    });
    double m = -std::numeric_limits<double>::infinity();
    for (double p : partial) m = std::max(m, p);
    return m;
}

double parallel_min(std::int64_t n, const std::function<double(std::int64_t)>& value) {
    return -parallel_max(n, [&value](std::int64_t i) { return -value(i); });
}

}  // namespace balance_lab
