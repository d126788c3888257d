#include "moments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "error.hpp"
#include "summation.hpp"

namespace twistlab {

namespace {

// Per-(kind, Y) precomputation: the inner sum runs over a fixed integer range
// with fixed term weights; only chi_d varies with the discriminant.
struct InnerTerms {
    std::int64_t n_lo = 1, n_hi = 0;  // inclusive; empty if n_hi < n_lo
    std::vector<double> v;            // v[n - n_lo]

    std::uint64_t count() const noexcept {
        return n_hi >= n_lo ? static_cast<std::uint64_t>(n_hi - n_lo + 1) : 0;
    }
};

InnerTerms make_inner_terms(MomentKind kind, double y, const EigenvalueTable* eigen,
                            const SmoothWeight* w) {
    InnerTerms terms;
    if (kind == MomentKind::SharpT) {
        terms.n_lo = 1;
        terms.n_hi = static_cast<std::int64_t>(std::floor(y));
    } else {
        if (w == nullptr) fail(ErrorCode::InvalidArgument, "smoothed moments need a weight");
        const double lo = w->support_lo() * y;
        const double hi = w->support_hi() * y;
        terms.n_lo = static_cast<std::int64_t>(std::floor(lo)) + 1;
        terms.n_hi = static_cast<std::int64_t>(std::ceil(hi)) - 1;
    }
    if (terms.n_hi < terms.n_lo) {
        terms.n_hi = terms.n_lo - 1;
        return terms;  // the support holds no integers
    }
    const bool needs_eigen = kind != MomentKind::SmoothedS;
    if (needs_eigen) {
        if (eigen == nullptr)
            fail(ErrorCode::InvalidArgument, "this moment kind needs an eigenvalue table");
        if (static_cast<std::uint64_t>(terms.n_hi) > eigen->limit)
            fail(ErrorCode::Coverage,
                 "eigenvalue table covers n <= " + std::to_string(eigen->limit) +
                 " but the sum needs n <= " + std::to_string(terms.n_hi));
    }
    terms.v.resize(static_cast<std::size_t>(terms.n_hi - terms.n_lo + 1));
    for (std::int64_t n = terms.n_lo; n <= terms.n_hi; ++n) {
        const double lam =
            needs_eigen ? eigen->lambda(static_cast<std::uint64_t>(n)) : 1.0;
        const double phi = kind == MomentKind::SharpT ? 1.0 : (*w)(static_cast<double>(n) / y);
        terms.v[static_cast<std::size_t>(n - terms.n_lo)] = lam * phi;
    }
    return terms;
}

// chi_d(n) for all n <= n_hi by complete multiplicativity over the SPF table;
// one reciprocity evaluation per prime.
void fill_chi(std::int64_t d, std::int64_t n_hi, const SpfSieve& spf, std::int8_t* chi) {
    chi[1] = 1;
    for (std::int64_t n = 2; n <= n_hi; ++n) {
        const std::uint32_t p = spf.spf[static_cast<std::uint64_t>(n)];
        if (static_cast<std::int64_t>(p) == n)
            chi[n] = static_cast<std::int8_t>(kronecker(d, static_cast<std::uint64_t>(p)));
        else
            chi[n] = static_cast<std::int8_t>(chi[n / p] * chi[p]);
    }
}

double inner_sum(const InnerTerms& terms, const std::int8_t* chi) {
    double h = 0.0;
    for (std::int64_t n = terms.n_lo; n <= terms.n_hi; ++n)
        h += chi[n] * terms.v[static_cast<std::size_t>(n - terms.n_lo)];
    return h;
}

double abs_pow(double h, double m) { return m == 0.0 ? 1.0 : std::pow(std::abs(h), m); }

}  // namespace

TwistedSumValue twisted_sum(std::int64_t d, double y, const EigenvalueTable& eigen,
                            const SmoothWeight& w) {
    if (d < 1 || !(is_fundamental(d) ||
                   (d % 2 == 1 && is_squarefree(static_cast<std::uint64_t>(d)))))
        fail(ErrorCode::InvalidArgument,
             "twisted_sum discriminant " + std::to_string(d) +
             " is neither fundamental nor odd square-free");
    const InnerTerms terms = make_inner_terms(MomentKind::SmoothedT, y, &eigen, &w);
    TwistedSumValue out{d, y, 0.0, terms.count()};
    if (terms.count() == 0) return out;
    const SpfSieve spf = build_spf(static_cast<std::uint64_t>(terms.n_hi));
    std::vector<std::int8_t> chi(static_cast<std::size_t>(terms.n_hi + 1), 0);
    fill_chi(d, terms.n_hi, spf, chi.data());
    out.value = inner_sum(terms, chi.data());
    return out;
}

std::string moment_kind_name(MomentKind k) {
    switch (k) {
        case MomentKind::SmoothedT: return "T";
        case MomentKind::SmoothedS: return "S";
        case MomentKind::SharpT: return "T-sharp";
    }
    return "?";
}

MomentKind moment_kind_from_name(const std::string& name) {
    if (name == "T") return MomentKind::SmoothedT;
    if (name == "S") return MomentKind::SmoothedS;
    if (name == "T-sharp") return MomentKind::SharpT;
    fail(ErrorCode::InvalidArgument, "unknown moment kind '" + name + "' (T, S, T-sharp)");
}

double predicted_log_exponent(MomentKind kind, double m) {
    switch (kind) {
        case MomentKind::SmoothedT: return 0.5 * m * (m - 3.0);
        case MomentKind::SmoothedS: return 0.5 * m * (m + 1.0);
        case MomentKind::SharpT: return 0.5 * (m - 1.0) * (m - 2.0) + 1.0;
    }
    return 0.0;
}

MomentReport moment(MomentKind kind, double x, double y, double m, Family family,
                    const EigenvalueTable* eigen, const SmoothWeight* w,
                    const DiscriminantSet* discs, int threads) {
    if (!(m >= 0.0)) fail(ErrorCode::InvalidArgument, "moment order m must be nonnegative");
    if (!(x >= 1.0) || !(y >= 0.0)) fail(ErrorCode::InvalidArgument, "moment needs X >= 1, Y >= 0");

    const auto t0 = std::chrono::steady_clock::now();

    DiscriminantSet local;
    if (discs == nullptr) {
        local = sieve_discriminants(x, family);
        discs = &local;
    }

    const InnerTerms terms = make_inner_terms(kind, y, eigen, w);
    const SpfSieve spf = build_spf(terms.count() ? static_cast<std::uint64_t>(terms.n_hi) : 1);

    const auto& ds = *discs;
    auto worker_factory = [&]() {
        return [&ds, &terms, &spf, m,
                chi = std::vector<std::int8_t>(static_cast<std::size_t>(terms.n_hi + 1), 0)](
                   std::size_t i, std::array<CompensatedSum, 1>& acc) mutable {
            double h = 0.0;
            if (terms.count() != 0) {
                fill_chi(ds.values[i], terms.n_hi, spf, chi.data());
                h = inner_sum(terms, chi.data());
            }
            acc[0].add(abs_pow(h, m));
        };
    };
    const auto sums = chunked_reduce<1>(ds.size(), threads, worker_factory);

    MomentReport report;
    report.kind = kind;
    report.family = family;
    report.x = x;
    report.y = y;
    report.m = m;
    report.moment = sums[0];
    report.discriminants = ds.size();
    report.predicted =
        x * std::pow(y, 0.5 * m) * std::pow(std::log(x), predicted_log_exponent(kind, m));
    report.ratio = report.predicted != 0.0 ? report.moment / report.predicted : 0.0;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

double YRule::operator()(double x) const {
    return kind == Kind::Power ? std::pow(x, value) : value;
}

YRule YRule::parse(const std::string& spec) {
    YRule rule;
    double v = 0;
    if (std::sscanf(spec.c_str(), "pow:%lf", &v) == 1) {
        rule.kind = Kind::Power;
        rule.value = v;
        return rule;
    }
    if (std::sscanf(spec.c_str(), "fixed:%lf", &v) == 1) {
        rule.kind = Kind::Fixed;
        rule.value = v;
        return rule;
    }
    fail(ErrorCode::InvalidArgument, "Y rule must be 'pow:E' or 'fixed:V' (got '" + spec + "')");
}

std::string YRule::spec() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s:%.17g", kind == Kind::Power ? "pow" : "fixed", value);
    return buf;
}

std::vector<MomentReport> scaling_scan(MomentKind kind, double m, std::span<const double> x_grid,
                                       const YRule& y_rule, Family family,
                                       const EigenvalueTable* eigen, const SmoothWeight* w,
                                       int threads) {
    if (x_grid.empty()) fail(ErrorCode::InvalidArgument, "scaling scan needs a nonempty X grid");
    std::vector<MomentReport> out;
    out.reserve(x_grid.size());
    for (const double x : x_grid)
        out.push_back(moment(kind, x, y_rule(x), m, family, eigen, w, nullptr, threads));
    return out;
}

HolderTriple holder_check(double x, double y, int m, double epsilon, Family family,
                          const EigenvalueTable& eigen, const SmoothWeight& w,
                          const DiscriminantSet* discs, int threads) {
    if (m < 4 || m % 2 != 0)
        fail(ErrorCode::InvalidArgument, "holder_check needs an even m >= 4");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        fail(ErrorCode::InvalidArgument, "holder_check needs epsilon in (0, 1)");
    if (!(x >= 1.0) || !(y >= 1.0)) fail(ErrorCode::InvalidArgument, "holder_check needs X, Y >= 1");

    DiscriminantSet local;
    if (discs == nullptr) {
        local = sieve_discriminants(x, family);
        discs = &local;
    }

    const double y_eps = std::pow(y, epsilon);
    const InnerTerms big = make_inner_terms(MomentKind::SmoothedT, y, &eigen, &w);
    const InnerTerms small = make_inner_terms(MomentKind::SmoothedT, y_eps, &eigen, &w);
    const std::int64_t n_hi =
        std::max<std::int64_t>({big.n_hi, small.n_hi, 1});
    const SpfSieve spf = build_spf(static_cast<std::uint64_t>(n_hi));

    const auto& ds = *discs;
    auto worker_factory = [&]() {
        return [&ds, &big, &small, &spf, m, n_hi,
                chi = std::vector<std::int8_t>(static_cast<std::size_t>(n_hi + 1), 0)](
                   std::size_t i, std::array<CompensatedSum, 3>& acc) mutable {
            fill_chi(ds.values[i], n_hi, spf, chi.data());
            const double h = big.count() ? inner_sum(big, chi.data()) : 0.0;
            const double h_eps = small.count() ? inner_sum(small, chi.data()) : 0.0;
            acc[0].add(h * std::pow(h_eps, m - 1));
            acc[1].add(abs_pow(h_eps, m));
            acc[2].add(abs_pow(h, m));
        };
    };
    const auto sums = chunked_reduce<3>(ds.size(), threads, worker_factory);

    HolderTriple triple;
    triple.h1 = sums[0];
    triple.h2 = sums[1];
    triple.tm = sums[2];
    triple.m = m;
    triple.epsilon = epsilon;
    const double lhs = std::pow(std::abs(triple.h1), m);
    const double rhs = std::pow(triple.h2, m - 1) * triple.tm;
    triple.slack = rhs - lhs;
    const double tol = 1e-9 * std::max(std::abs(lhs), std::abs(rhs)) + 1e-300;
    if (lhs > rhs + tol)
        fail(ErrorCode::Invariant,
             "Holder inequality violated: H1^m = " + std::to_string(lhs) + " > H2^(m-1) Tm = " +
             std::to_string(rhs) + " (this is unconditional mathematics; an implementation bug)");
    return triple;
}

}  // namespace twistlab
