#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "weierdim/types.hpp"

namespace weierdim {

/// Name of the environment variable capping the number of worker threads.
inline constexpr char const* kThreadsEnv = "WEIERDIM_THREADS";

/**
 * Worker count from WEIERDIM_THREADS, else the hardware concurrency.
 * Throws std::invalid_argument for a malformed value.
 */
inline unsigned worker_count()
{
    if (char const* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096)
            throw std::invalid_argument(std::string(kThreadsEnv) + " must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Calls fn(i) for every i in [0, count). Work is handed out in contiguous
 * chunks; fn must only write to slots owned by index i, which makes the
 * result independent of the worker count.
 */
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn)
{
    unsigned const workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::size_t const chunk = std::max<std::size_t>(1, count / (8 * workers));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t begin = next.fetch_add(chunk);
            if (begin >= count) return;
            std::size_t end = std::min(count, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace weierdim
