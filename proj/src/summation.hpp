#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

namespace twistlab {

// Neumaier variant of compensated summation: the running compensation also
// absorbs the case |x| > |sum|.
class CompensatedSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Fixed chunk size for deterministic parallel reductions: items are summed
// per chunk with compensation, chunk partials are merged in index order, so
// the result is independent of the thread count.
inline constexpr std::size_t kReduceChunk = std::size_t{1} << 14;

// worker_factory() -> callable f(item_index, std::array<CompensatedSum, K>&).
// Each thread gets its own worker instance (for scratch buffers).
template <std::size_t K, class WorkerFactory>
std::array<double, K> chunked_reduce(std::size_t count, int threads, WorkerFactory&& worker_factory) {
    const std::size_t nchunks = (count + kReduceChunk - 1) / kReduceChunk;
    std::vector<std::array<double, K>> partial(nchunks);

    auto run_chunk = [&](auto& worker, std::size_t c) {
        std::array<CompensatedSum, K> acc{};
        const std::size_t lo = c * kReduceChunk;
        const std::size_t hi = std::min(count, lo + kReduceChunk);
        for (std::size_t i = lo; i < hi; ++i) worker(i, acc);
        for (std::size_t k = 0; k < K; ++k) partial[c][k] = acc[k].value();
    };

    if (threads <= 1 || nchunks <= 1) {
        auto worker = worker_factory();
        for (std::size_t c = 0; c < nchunks; ++c) run_chunk(worker, c);
    } else {
        std::atomic<std::size_t> next{0};
        auto thread_main = [&]() {
            auto worker = worker_factory();
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= nchunks) break;
                run_chunk(worker, c);
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min<std::size_t>(threads, nchunks);
        pool.reserve(n);
        for (int t = 0; t < n; ++t) pool.emplace_back(thread_main);
        for (auto& t : pool) t.join();
    }

    // fixed merge order
    std::array<double, K> out{};
    for (std::size_t k = 0; k < K; ++k) {
        CompensatedSum s;
        for (std::size_t c = 0; c < nchunks; ++c) s.add(partial[c][k]);
        out[k] = s.value();
    }
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Independent per-batch substream seed for a counter-based sampling scheme.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t batch) noexcept {
    return splitmix64(seed ^ splitmix64(batch + 1));
}

}  // namespace twistlab
