#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace weyl {

// requested > 0 wins, then WEYL_THREADS, then hardware concurrency
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("WEYL_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Splits [0, n_items) into fixed chunks of chunk_size and runs
// work(begin, end, worker_id) over them. Chunk boundaries depend only on
// (n_items, chunk_size), never on the thread count or schedule, so exact
// per-chunk results admit a schedule-independent reduction.
template <class Work>
void parallel_chunked(std::size_t n_items, std::size_t chunk_size, int threads, Work work) {
    if (n_items == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            std::size_t b = c * chunk_size;
            std::size_t e = std::min(n_items, b + chunk_size);
            work(b, e, 0);
        }
        return;
    }
    const int n_workers = static_cast<int>(std::min<std::size_t>(threads, n_chunks));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                while (true) {
                    std::size_t c = next.fetch_add(1);
                    if (c >= n_chunks || failed.load()) return;
                    std::size_t b = c * chunk_size;
                    std::size_t e = std::min(n_items, b + chunk_size);
                    work(b, e, w);
                }
            } catch (...) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true)) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

}  // namespace weyl
