#ifndef CAPLB_PARALLEL_HPP
#define CAPLB_PARALLEL_HPP

/// Block-static data parallelism. Work is split into fixed-size blocks
/// assigned to workers by block index, so per-block partial results (and
/// therefore any reduction combined in block order) are bitwise identical
/// for every worker count.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace caplb {

inline constexpr std::int64_t kParallelBlock = 4096;

inline std::int64_t num_blocks(std::int64_t n) {
    return (n + kParallelBlock - 1) / kParallelBlock;
}

/// Worker count: explicit request > CAPLB_THREADS > hardware, min 1.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CAPLB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

/// fn(begin, end, block_index) over [0, n) in kParallelBlock chunks.
template <typename Fn>
void parallel_for_blocks(std::int64_t n, int threads, Fn&& fn) {
    const std::int64_t blocks = num_blocks(n);
    if (threads <= 1 || blocks <= 1) {
        for (std::int64_t b = 0; b < blocks; ++b) {
            const std::int64_t lo = b * kParallelBlock;
            fn(lo, std::min(lo + kParallelBlock, n), b);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::int64_t b = t; b < blocks; b += threads) {
                const std::int64_t lo = b * kParallelBlock;
                fn(lo, std::min(lo + kParallelBlock, n), b);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace caplb

#endif
