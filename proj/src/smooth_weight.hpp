#pragma once

#include <complex>
#include <string>

namespace twistlab {

// Compactly supported C-infinity bump
//   phi(x) = scale * exp(-1 / ((x - a)(b - x)))  for a < x < b,  0 otherwise,
// with 0 < a < b. All derivatives vanish at the endpoints.
class SmoothWeight {
public:
    SmoothWeight(double a, double b, double scale = 1.0);

    // Weight spec strings of the form "bump:a,b", e.g. "bump:1,2".
    static SmoothWeight parse(const std::string& spec);

    double operator()(double x) const noexcept;

    double support_lo() const noexcept { return a_; }
    double support_hi() const noexcept { return b_; }
    double amplitude() const noexcept { return scale_; }
    SmoothWeight scaled(double c) const { return SmoothWeight(a_, b_, scale_ * c); }
    std::string spec() const;

private:
    double a_, b_, scale_;
};

struct MellinValue {
    std::complex<double> s;
    std::complex<double> value;       // integral over (0, inf) of phi(x) x^{s-1} dx
    double quadrature_error;          // accumulated panel-error estimate
};

// Adaptive bisection with a fixed-order Gauss rule per panel; deterministic
// panel ordering. Throws QuadratureError (with the best estimate attached)
// if the tolerance is unreachable within the panel budget.
MellinValue mellin(const SmoothWeight& w, std::complex<double> s, double tol);

struct DecayReport {
    int order = 0;                    // E
    double sigma_lo = 0, sigma_hi = 0, t_max = 0;
    double sup = 0;                   // grid sup of |phihat(sigma+it)| (1+|t|)^E
    double sup_sigma = 0, sup_t = 0;  // where the sup was attained
    std::size_t grid_points = 0;
};

// Grid verification of the decay |phihat(s)| (1+|s|)^E bounded for
// Re(s) in [sigma_lo, sigma_hi], |Im(s)| <= t_max. Supports E <= 4.
DecayReport verify_decay(const SmoothWeight& w, int order, double sigma_lo, double sigma_hi,
                         double t_max);

}  // namespace twistlab
