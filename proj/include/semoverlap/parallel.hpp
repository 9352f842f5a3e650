#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace semoverlap {

/// Evaluates fn(0..count-1) on up to `workers` threads and returns the
/// results in index order. The first exception thrown by fn is rethrown
/// after all threads join.
template <class Fn>
auto ordered_parallel_map(std::size_t count, std::size_t workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<Result>> slots(count);
    workers = std::max<std::size_t>(1, std::min(workers, count));

    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            slots[i].emplace(fn(i));
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto run = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    slots[i].emplace(fn(i));
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        };
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(run);
        pool.clear();
        if (failure)
            std::rethrow_exception(failure);
    }

    std::vector<Result> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

} // namespace semoverlap
