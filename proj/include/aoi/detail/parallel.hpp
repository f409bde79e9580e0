#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace aoi::detail {

/// Evaluates fn(i) for i in [0, chunks) on up to `threads` workers and
/// returns the results in index order. The first failing chunk (by index)
/// rethrows, so the outcome does not depend on scheduling.
template <class Result, class Fn>
std::vector<Result> run_chunks(std::size_t chunks, unsigned threads, Fn&& fn) {
    std::vector<Result> results(chunks);
    std::vector<std::exception_ptr> errors(chunks);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < chunks; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

/// Size of chunk i when n items are split into `chunks` near-equal parts.
inline std::size_t chunk_size(std::size_t n, std::size_t chunks, std::size_t i) {
    return n / chunks + (i < n % chunks ? 1 : 0);
}

}  // namespace aoi::detail
