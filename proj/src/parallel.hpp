#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace bed::detail {

// Worker cap from BED_THREADS: unset or 1 runs serially, 0 uses every hardware thread.
std::size_t worker_count();

// Calls fn(begin, end) over contiguous chunks of [0, count). Chunks never share an
// index, so per-item results do not depend on the partitioning.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t min_chunk = 32) {
    const std::size_t workers =
        std::min(worker_count(), std::max<std::size_t>(1, count / std::max<std::size_t>(1, min_chunk)));
    if (workers <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(std::size_t{0}, std::min(count, chunk));
}

}  // namespace bed::detail
