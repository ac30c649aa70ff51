#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace approxnfa {

/// Worker count from APPROXNFA_WORKERS, else the hardware concurrency (at least 1).
unsigned default_workers();

/// Splits [0, n) into `workers` contiguous chunks and runs body(worker, begin, end)
/// on each, one thread per chunk. The first exception thrown by a worker is rethrown.
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
    if (workers == 1) {
        body(0u, std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = n * w / workers;
        std::size_t end = n * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
            try {
                body(w, begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace approxnfa
