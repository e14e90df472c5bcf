#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sparareal {

/// Degree of parallelism. Results never depend on it.
struct Execution {
    unsigned threads = 1;
};

/// Calls fn(i) for i in [0, count). With more than one thread, indices are
/// split into contiguous blocks. If any call throws, the exception from the
/// lowest failing index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, const Execution& exec, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, exec.threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> failed_at(workers, count);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        failed_at[w] = i;
                        return;
                    }
                }
            });
        }
    }
    const auto first = std::min_element(failed_at.begin(), failed_at.end());
    if (*first < count) std::rethrow_exception(errors[static_cast<std::size_t>(first - failed_at.begin())]);
}

}  // namespace sparareal
