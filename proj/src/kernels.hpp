#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace twistlab {

// Parameters of the piecewise kernels: x sets the 1/log x and e^x
// breakpoints, b the right end of region 3.
struct KernelParams {
    double x = 0.0;  // requires x >= 3 (so log x > 1)
    double b = 0.0;  // requires b >= 10
};

void validate_kernel_params(const KernelParams& params);

// First matching branch in the listed order wins:
//   g1: log X on [0, 1/log X] and [e^X, inf); 1/t on [1/log X, 10]; log log t on [10, e^X]
//   g2: 1 on [0, e^e]; log log t on [e^e, e^X]; log X on [e^X, inf)
// g1 jumps at t = 10 (1/10 vs log log 10); the listed case order is followed.
double g1(double t, const KernelParams& params);
double g2(double t, const KernelParams& params);

// prod_{i<j} g1(|t_i-t_j|)^{1/2} g1(t_i+t_j)^{1/2} * prod_i g1(2 t_i)^{-1/4};
// the (log X)^{m/4} prefactor is applied by the integrator, not here.
double kernel_integrand(std::span<const double> t, const KernelParams& params);

struct RegionBounds {
    double lo = 0.0, hi = 0.0;
};
// Region 1: [0, 1/(2 log X)], region 2: [1/(2 log X), 5], region 3: [5, B].
RegionBounds region_bounds(int region, const KernelParams& params);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// Monte-Carlo estimate of I_{m,B,k} = (log X)^{m/4} * integral over the
// ordered simplex of the kernel product. Uniform samples in the cube divided
// by m! realize the simplex because the integrand is permutation-symmetric.
// Reproducible for a fixed seed independently of the thread count.
McEstimate region_integral(int m, int region, const KernelParams& params, std::uint64_t samples,
                           std::uint64_t seed, int threads = 1);

struct RegionScalingRow {
    double b = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double envelope = 0.0;  // B^2 (log X)^{m(m-3)/2}
    double ratio = 0.0;
};
struct RegionScalingTable {
    int m = 0;
    double envelope_log_exponent = 0.0;  // m(m-3)/2
    std::vector<RegionScalingRow> rows;
};

RegionScalingTable region3_scaling(int m, double x, std::span<const double> b_grid,
                                   std::uint64_t samples, std::uint64_t seed, int threads = 1);

}  // namespace twistlab
