#ifndef BALANCE_LAB_PARALLEL_HPP
#define BALANCE_LAB_PARALLEL_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace balance_lab {

/// Number of worker threads: hardware concurrency capped by the
/// BALANCE_LAB_THREADS environment variable (>= 1).
int worker_count();

/// Runs fn(stripe, begin, end) over contiguous stripes of [0, n).
/// Stripe boundaries depend only on n and worker_count(), so per-stripe
/// results can be combined in stripe order for deterministic reductions.
void for_stripes(std::int64_t n, const std::function<void(int, std::int64_t, std::int64_t)>& fn);

/// max over i in [0,n) of value(i); parallel, deterministic (max is exact).
double parallel_max(std::int64_t n, const std::function<double(std::int64_t)>& value);

/// min over i in [0,n) of value(i); parallel, deterministic.
double parallel_min(std::int64_t n, const std::function<double(std::int64_t)>& value);

}  // namespace balance_lab

#endif
