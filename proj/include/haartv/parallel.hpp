#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace haartv {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(chunk_index) for every chunk in [0, chunk_count) on a small thread
// pool. Chunks are claimed from a shared counter, so assignment to threads is
// nondeterministic; callers must write results into per-chunk slots and merge
// in chunk order to stay independent of the worker count.
template <typename Fn>
void run_chunked(std::size_t chunk_count, int workers, Fn&& fn) {
    const int nworkers = resolve_workers(workers);
    if (nworkers <= 1 || chunk_count <= 1) {
        for (std::size_t c = 0; c < chunk_count; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunk_count || failed.load()) return;
            try {
                fn(c);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nspawn = static_cast<int>(std::min<std::size_t>(nworkers, chunk_count));
    pool.reserve(nspawn);
    for (int t = 0; t < nspawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace haartv
