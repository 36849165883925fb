#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ballwalk {

/// Worker-count bound. Results never depend on it.
struct Parallelism {
    unsigned threads = 1;
};

/// Runs task(i) for i in [0, n_tasks) on up to `threads` workers. Tasks are
/// claimed dynamically, so each task must write only to its own slot. The
/// first exception thrown by any task is rethrown after all workers join.
template <class Task>
void for_each_task(std::size_t n_tasks, const Parallelism& par, Task&& task) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, par.threads), n_tasks);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n_tasks;
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace ballwalk
