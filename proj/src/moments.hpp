#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "characters.hpp"
#include "eigenvalues.hpp"
#include "smooth_weight.hpp"

namespace twistlab {

// H_d(Y) = sum_n chi_d(n) lambda(n) Phi(n/Y), a finite sum over the support.
struct TwistedSumValue {
    std::int64_t d = 0;
    double y = 0.0;
    double value = 0.0;
    std::uint64_t terms_used = 0;
};

TwistedSumValue twisted_sum(std::int64_t d, double y, const EigenvalueTable& eigen,
                            const SmoothWeight& w);

enum class MomentKind {
    SmoothedT,  // sum* |sum_n chi_d(n) lambda(n) Phi(n/Y)|^m
    SmoothedS,  // lambda replaced by the constant 1
    SharpT,     // sharp cutoff n <= Y, no weight
};

std::string moment_kind_name(MomentKind k);
MomentKind moment_kind_from_name(const std::string& name);

// Reference (log X)-exponent of the growth envelope X Y^{m/2} (log X)^e.
double predicted_log_exponent(MomentKind kind, double m);

struct MomentReport {
    MomentKind kind = MomentKind::SmoothedT;
    Family family = Family::Fundamental;
    double x = 0.0, y = 0.0, m = 0.0;
    double moment = 0.0;
    std::uint64_t discriminants = 0;
    double predicted = 0.0;  // X Y^{m/2} (log X)^e, diagnostic only
    double ratio = 0.0;      // moment / predicted
    double seconds = 0.0;
};

// m = 0 is the counting convention (|.|^0 = 1). eigen may be null for the
// S kind; discs may be null, in which case the family is sieved on the fly.
MomentReport moment(MomentKind kind, double x, double y, double m, Family family,
                    const EigenvalueTable* eigen, const SmoothWeight* w,
                    const DiscriminantSet* discs, int threads = 1);

struct YRule {
    enum class Kind { Power, Fixed } kind = Kind::Power;
    double value = 0.5;

    double operator()(double x) const;
    static YRule parse(const std::string& spec);  // "pow:0.4" or "fixed:1000"
    std::string spec() const;
};

std::vector<MomentReport> scaling_scan(MomentKind kind, double m, std::span<const double> x_grid,
                                       const YRule& y_rule, Family family,
                                       const EigenvalueTable* eigen, const SmoothWeight* w,
                                       int threads = 1);

// H1 = sum* H_d(Y) H_d(Y^eps)^{m-1}, H2 = sum* |H_d(Y^eps)|^m, Tm = sum* |H_d(Y)|^m,
// and the unconditional inequality H1^m <= H2^{m-1} Tm. A violation beyond the
// relative tolerance 1e-9 is an implementation bug and throws.
struct HolderTriple {
    double h1 = 0.0, h2 = 0.0, tm = 0.0;
    int m = 0;
    double epsilon = 0.0;
    double slack = 0.0;  // H2^{m-1} Tm - H1^m
};

HolderTriple holder_check(double x, double y, int m, double epsilon, Family family,
                          const EigenvalueTable& eigen, const SmoothWeight& w,
                          const DiscriminantSet* discs, int threads = 1);

}  // namespace twistlab
