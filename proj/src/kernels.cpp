#include "kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "error.hpp"
#include "summation.hpp"

namespace twistlab {

namespace {

double exp_cap(double x) {
    // e^x as a breakpoint; beyond ~700 it exceeds the double range and the
    // branch is unreachable, which matches the mathematics at large x
    return x > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(x);
}

constexpr double kEE = 15.154262241479262;  // e^e

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

}  // namespace

void validate_kernel_params(const KernelParams& params) {
    if (!(params.x >= 3.0))
        fail(ErrorCode::InvalidArgument, "kernel parameter X must be >= 3 (log X > 1)");
    if (!(params.b >= 10.0)) fail(ErrorCode::InvalidArgument, "kernel parameter B must be >= 10");
}

double g1(double t, const KernelParams& params) {
    const double lx = std::log(params.x);
    const double ex = exp_cap(params.x);
    if (t <= 1.0 / lx || t >= ex) return lx;
    if (t <= 10.0) return 1.0 / t;
    return std::log(std::log(t));
}

double g2(double t, const KernelParams& params) {
    const double ex = exp_cap(params.x);
    if (t <= kEE) return 1.0;
    if (t <= ex) return std::log(std::log(t));
    return std::log(params.x);
}

double kernel_integrand(std::span<const double> t, const KernelParams& params) {
    const int m = static_cast<int>(t.size());
    double prod = 1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            prod *= std::sqrt(g1(std::abs(t[i] - t[j]), params) * g1(t[i] + t[j], params));
    for (int i = 0; i < m; ++i) prod *= std::pow(g1(2.0 * t[i], params), -0.25);
    return prod;
}

RegionBounds region_bounds(int region, const KernelParams& params) {
    validate_kernel_params(params);
    const double half_inv_log = 1.0 / (2.0 * std::log(params.x));
    switch (region) {
        case 1: return {0.0, half_inv_log};
        case 2: return {half_inv_log, 5.0};
        case 3: return {5.0, params.b};
    }
    fail(ErrorCode::InvalidArgument, "region index must be 1, 2 or 3");
}

McEstimate region_integral(int m, int region, const KernelParams& params, std::uint64_t samples,
                           std::uint64_t seed, int threads) {
    if (m < 1 || m > 16) fail(ErrorCode::InvalidArgument, "kernel arity m must be in [1, 16]");
    if (samples < 1000)
        fail(ErrorCode::InvalidArgument, "Monte-Carlo needs at least 10^3 samples");
    const RegionBounds bounds = region_bounds(region, params);
    const double width = bounds.hi - bounds.lo;

    constexpr std::uint64_t kBatch = 8192;
    const std::uint64_t nbatches = (samples + kBatch - 1) / kBatch;
    std::vector<double> batch_sum(nbatches), batch_sumsq(nbatches);
    std::vector<std::uint64_t> batch_n(nbatches);

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> bad{false};

    auto run_batches = [&]() {
        double coords[16];
        for (;;) {
            const std::uint64_t batch = next.fetch_add(1);
            if (batch >= nbatches || bad.load()) break;
            const std::uint64_t n =
                std::min<std::uint64_t>(kBatch, samples - batch * kBatch);
            // independent substream per batch; merge order is fixed below
            std::uint64_t state = substream_seed(seed, batch);
            double s = 0.0, s2 = 0.0;
            for (std::uint64_t i = 0; i < n; ++i) {
                for (int c = 0; c < m; ++c) {
                    state = splitmix64(state);
                    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
                    coords[c] = bounds.lo + u * width;
                }
                const double f =
                    kernel_integrand(std::span<const double>(coords, static_cast<std::size_t>(m)),
                                     params);
                if (!std::isfinite(f)) {
                    bad.store(true);
                    return;
                }
                s += f;
                s2 += f * f;
            }
            batch_sum[batch] = s;
            batch_sumsq[batch] = s2;
            batch_n[batch] = n;
        }
    };

    if (threads <= 1) {
        run_batches();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(run_batches);
        for (auto& t : pool) t.join();
    }
    if (bad.load())
        fail(ErrorCode::Invariant,
             "non-finite kernel integrand sample (breakpoint bug in g1/g2)");

    // fixed-order merge of batch statistics
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t b = 0; b < nbatches; ++b) {
        sum += batch_sum[b];
        sumsq += batch_sumsq[b];
    }

    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double variance = std::max(0.0, (sumsq / n - mean * mean) * n / (n - 1.0));
    const double scale = std::pow(std::log(params.x), 0.25 * m) * std::pow(width, m) /
                         factorial(m);

    McEstimate out;
    out.value = mean * scale;
    out.std_error = std::sqrt(variance / n) * scale;
    out.samples = samples;
    return out;
}

RegionScalingTable region3_scaling(int m, double x, std::span<const double> b_grid,
                                   std::uint64_t samples, std::uint64_t seed, int threads) {
    if (b_grid.empty()) fail(ErrorCode::InvalidArgument, "region-3 scan needs a nonempty B grid");
    RegionScalingTable table;
    table.m = m;
    table.envelope_log_exponent = 0.5 * m * (m - 3);
    for (const double b : b_grid) {
        const KernelParams params{x, b};
        const McEstimate est = region_integral(m, 3, params, samples, seed, threads);
        RegionScalingRow row;
        row.b = b;
        row.estimate = est.value;
        row.std_error = est.std_error;
        row.envelope = b * b * std::pow(std::log(x), table.envelope_log_exponent);
        row.ratio = row.estimate / row.envelope;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace twistlab
