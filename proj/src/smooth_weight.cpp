#include "smooth_weight.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "error.hpp"

namespace twistlab {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
constexpr int kGaussHalf = 8;
constexpr double kGaussNode[kGaussHalf] = {
    0.0,
    0.2011940939974345223006283,
    0.3941513470775633698972074,
    0.5709721726085388475372267,
    0.7244177313601700474161861,
    0.8482065834104272162006483,
    0.9372733924007059043077589,
    0.9879925180204854284895657,
};
constexpr double kGaussWeight[kGaussHalf] = {
    0.2025782419255612728806202,
    0.1984314853271115764561183,
    0.1861610000155622110268006,
    0.1662692058169939335532009,
    0.1395706779261543144478048,
    0.1071592204671719350118695,
    0.0703660474881081247092674,
    0.0307532419961172683546284,
};

}  // namespace

SmoothWeight::SmoothWeight(double a, double b, double scale) : a_(a), b_(b), scale_(scale) {
    if (!(a > 0.0) || !(a < b))
        fail(ErrorCode::InvalidArgument,
             "bump support needs 0 < a < b (got a=" + std::to_string(a) +
             ", b=" + std::to_string(b) + ")");
}

SmoothWeight SmoothWeight::parse(const std::string& spec) {
    double a = 0, b = 0;
    if (std::sscanf(spec.c_str(), "bump:%lf,%lf", &a, &b) != 2)
        fail(ErrorCode::InvalidArgument,
             "weight spec must look like 'bump:a,b' (got '" + spec + "')");
    return SmoothWeight(a, b);
}

std::string SmoothWeight::spec() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bump:%.17g,%.17g", a_, b_);
    return buf;
}

double SmoothWeight::operator()(double x) const noexcept {
    if (x <= a_ || x >= b_) return 0.0;
    const double u = (x - a_) * (b_ - x);
    return scale_ * std::exp(-1.0 / u);
}

namespace {

struct Panel {
    double lo, hi;
    std::complex<double> estimate;
    int depth;
};

std::complex<double> gauss15(const SmoothWeight& w, std::complex<double> s, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    auto f = [&](double x) -> std::complex<double> {
        const double v = w(x);
        if (v == 0.0) return {0.0, 0.0};
        // x^{s-1} = exp((s-1) log x), x > 0 on the support
        return v * std::exp((s - 1.0) * std::log(x));
    };
    std::complex<double> acc = kGaussWeight[0] * f(mid);
    for (int i = 1; i < kGaussHalf; ++i) {
        const double dx = half * kGaussNode[i];
        acc += kGaussWeight[i] * (f(mid - dx) + f(mid + dx));
    }
    return acc * half;
}

}  // namespace

MellinValue mellin(const SmoothWeight& w, std::complex<double> s, double tol) {
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "mellin tolerance must be positive");
    const double a = w.support_lo(), b = w.support_hi();

    constexpr int kMaxDepth = 48;
    constexpr std::size_t kMaxPanels = 200000;

    std::vector<Panel> stack;
    stack.push_back({a, b, gauss15(w, s, a, b), 0});
    std::complex<double> accepted{0.0, 0.0};
    double err_accepted = 0.0;
    std::size_t panels = 1;

    while (!stack.empty()) {
        const Panel panel = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (panel.lo + panel.hi);
        const std::complex<double> left = gauss15(w, s, panel.lo, mid);
        const std::complex<double> right = gauss15(w, s, mid, panel.hi);
        panels += 2;
        const double err = std::abs(panel.estimate - (left + right));
        const double local_tol = tol * (panel.hi - panel.lo) / (b - a);
        if (err <= local_tol || panel.depth >= kMaxDepth) {
            accepted += left + right;
            err_accepted += err;
        } else if (panels > kMaxPanels) {
            // budget exhausted: report what we have plus the pending panels
            std::complex<double> best = accepted + left + right;
            for (const auto& p : stack) best += p.estimate;
            throw QuadratureError(
                "mellin quadrature could not reach tol=" + std::to_string(tol) +
                " within the panel budget", best.real(), best.imag(), err_accepted + err);
        } else {
            // deterministic order: left sub-panel is processed first
            stack.push_back({mid, panel.hi, right, panel.depth + 1});
            stack.push_back({panel.lo, mid, left, panel.depth + 1});
        }
    }

    return {s, accepted, err_accepted};
}

DecayReport verify_decay(const SmoothWeight& w, int order, double sigma_lo, double sigma_hi,
                         double t_max) {
    if (order < 0 || order > 4)
        fail(ErrorCode::InvalidArgument,
             "decay order E must be between 0 and 4 (finite-difference smoothness "
             "order available)");
    if (!(sigma_lo <= sigma_hi) || !(t_max >= 0))
        fail(ErrorCode::InvalidArgument, "bad decay verification grid");

    DecayReport report;
    report.order = order;
    report.sigma_lo = sigma_lo;
    report.sigma_hi = sigma_hi;
    report.t_max = t_max;

    const int sigma_steps = 8;
    const double t_step = 0.5;
    for (int i = 0; i <= sigma_steps; ++i) {
        const double sigma =
            sigma_lo + (sigma_hi - sigma_lo) * static_cast<double>(i) / sigma_steps;
        for (double t = 0.0; t <= t_max + 1e-12; t += t_step) {
            const auto mv = mellin(w, {sigma, t}, 1e-12);
            const double weighted =
                std::abs(mv.value) * std::pow(1.0 + std::abs(t), static_cast<double>(order));
            ++report.grid_points;
            if (weighted > report.sup) {
                report.sup = weighted;
                report.sup_sigma = sigma;
                report.sup_t = t;
            }
        }
    }
    return report;
}

}  // namespace twistlab
