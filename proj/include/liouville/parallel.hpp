#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace liouville {

// Worker cap shared by the library. Defaults to LIOUVILLE_FORGE_THREADS when
// set, otherwise to the hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

// Splits [0, count) into contiguous chunks, one per worker, and calls
// fn(begin, end, chunk_index). Chunk boundaries depend only on count and the
// worker cap, so reductions that combine chunks in index order are
// deterministic for a fixed cap; order-independent reductions (min, max,
// set union) are deterministic for any cap.
template <typename Fn>
void parallel_chunks(std::size_t count, Fn&& fn, std::size_t min_chunk = 1024) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min(worker_count(), (count + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1)));
    if (workers <= 1) {
        fn(std::size_t{0}, count, std::size_t{0});
        return;
    }
    const std::size_t step = (count + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(count, w * step);
        const std::size_t end = std::min(count, begin + step);
        threads.emplace_back([&, begin, end, w] {
            try {
                fn(begin, end, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace liouville
