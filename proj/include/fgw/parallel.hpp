#pragma once

// Index-partitioned parallel loops. Results land in caller-owned slots indexed
// by task, so merged output never depends on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fgw {

/// Worker count: explicit override if set, else FGW_THREADS, else 1.
int thread_count();
void set_thread_count(int n);

namespace detail {
/// Set inside pool workers; nested loops then run inline instead of spawning.
inline thread_local bool in_worker = false;
} // namespace detail

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn)
{
    const std::size_t workers =
        detail::in_worker ? 1 : std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            detail::in_worker = true;
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn&& fn)
{
    std::vector<T> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace fgw
