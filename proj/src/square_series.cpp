#include "square_series.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "error.hpp"

namespace twistlab {

namespace {

bool is_prime_small(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t p = 3; p * p <= n; p += 2)
        if (n % p == 0) return false;
    return true;
}

double one_plus_inv_p_inverse(std::uint64_t p) {
    return static_cast<double>(p) / static_cast<double>(p + 1);
}

// kernel merge: square-free kernels multiply with shared primes cancelling
std::uint64_t merge_kernels(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t g = std::gcd(a, b);
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(a / g) * static_cast<unsigned __int128>(b / g);
    if (wide > ~std::uint64_t{0})
        fail(ErrorCode::Budget, "square-free kernel exceeded 64 bits; supports too large");
    return static_cast<std::uint64_t>(wide);
}

}  // namespace

double g_value(std::span<const std::uint64_t> idx, const EigenvalueTable& eigen, bool plus) {
    if (idx.empty()) fail(ErrorCode::InvalidArgument, "g_value needs arity >= 1");
    std::uint64_t kernel = 1;
    double lam_prod = 1.0;
    for (const std::uint64_t n : idx) {
        if (n == 0) fail(ErrorCode::InvalidArgument, "g_value entries must be positive");
        if (n > eigen.limit)
            fail(ErrorCode::Coverage,
                 "eigenvalue table covers n <= " + std::to_string(eigen.limit) +
                 " but g_value needs n = " + std::to_string(n));
        kernel = merge_kernels(kernel, squarefree_kernel(n));
        const double lam = eigen.lambda(n);
        lam_prod *= plus ? std::abs(lam) : lam;
    }
    if (kernel != 1) return 0.0;  // product is not a perfect square

    double local = 1.0;
    std::vector<std::uint32_t> primes;
    for (const std::uint64_t n : idx) {
        std::uint64_t rest = n;
        for (std::uint64_t p = 2; p * p <= rest; ++p) {
            if (rest % p != 0) continue;
            if (std::find(primes.begin(), primes.end(), p) == primes.end()) {
                primes.push_back(static_cast<std::uint32_t>(p));
                local *= one_plus_inv_p_inverse(p);
            }
            while (rest % p == 0) rest /= p;
        }
        if (rest > 1 && std::find(primes.begin(), primes.end(), rest) == primes.end()) {
            primes.push_back(static_cast<std::uint32_t>(rest));
            local *= one_plus_inv_p_inverse(rest);
        }
    }
    return lam_prod * local;
}

SymSquareCoefficients sym_square_coefficients(const EigenvalueTable& eigen, std::uint64_t limit) {
    if (limit == 0) fail(ErrorCode::InvalidArgument, "sym_square limit must be >= 1");
    if (eigen.limit < limit * limit)
        fail(ErrorCode::Coverage,
             "sym_square coefficients to " + std::to_string(limit) +
             " need eigenvalue coverage " + std::to_string(limit * limit) + ", table has " +
             std::to_string(eigen.limit));
    SymSquareCoefficients out;
    out.limit = limit;
    out.values.assign(limit + 1, 0.0);
    for (std::uint64_t n = 1; n <= limit; ++n) {
        double b = 0.0;
        for (std::uint64_t k = 1; k * k <= n; ++k) {
            if (n % (k * k) != 0) continue;
            const std::uint64_t j = n / (k * k);
            b += eigen.lambda(j * j);
        }
        out.values[n] = b;
    }
    return out;
}

namespace {

void check_local_factor_args(std::uint64_t p, int m, int degree, const EigenvalueTable& eigen) {
    if (!is_prime_small(p))
        fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
    if (m < 1 || m > TruncatedSeries::kMaxArity)
        fail(ErrorCode::InvalidArgument, "local factor arity out of range");
    if (degree < 0) fail(ErrorCode::InvalidArgument, "negative degree cap");
    if (p > eigen.limit)
        fail(ErrorCode::Coverage,
             "eigenvalue table covers n <= " + std::to_string(eigen.limit) +
             " but the local factor at p = " + std::to_string(p) + " needs lambda(p)");
}

// enumerate exponent tuples with total degree <= cap
template <class Fn>
void for_each_tuple(int m, int cap, std::vector<unsigned>& v, int pos, int used, Fn&& fn) {
    if (pos == m) {
        fn(v);
        return;
    }
    for (int e = 0; e + used <= cap; ++e) {
        v[pos] = static_cast<unsigned>(e);
        for_each_tuple(m, cap, v, pos + 1, used + e, fn);
    }
}

}  // namespace

TruncatedSeries local_factor_G(std::uint64_t p, int m, int degree, const EigenvalueTable& eigen,
                               bool plus) {
    check_local_factor_args(p, m, degree, eigen);
    TruncatedSeries out(m, degree);
    const double local = one_plus_inv_p_inverse(p);
    std::vector<unsigned> v(m, 0);
    for_each_tuple(m, degree, v, 0, 0, [&](const std::vector<unsigned>& tuple) {
        unsigned total = 0;
        for (const unsigned e : tuple) total += e;
        if (total == 0) {
            out.set_coeff(0, 1.0);
            return;
        }
        if (total % 2 != 0) return;  // square indicator kills odd total degree
        double c = local;
        for (const unsigned e : tuple) {
            const double lam = eigen.lambda_prime_power(p, e);
            c *= plus ? std::abs(lam) : lam;
        }
        out.set_coeff(TruncatedSeries::pack(tuple), c);
    });
    return out;
}

namespace {

// reciprocal polynomial of the local symmetric-square factor in the variable
// x = p^{-s}: 1 - lambda(p^2) x + lambda(p^2) x^2 - x^3, composed with a monomial
TruncatedSeries sym2_reciprocal(int m, int degree, double lam_p2, TruncatedSeries::Key x) {
    TruncatedSeries poly = TruncatedSeries::one(m, degree);
    // key arithmetic: the monomial x^k packs as k*x (byte-wise, no carries)
    poly.add_coeff(x, -lam_p2);
    poly.add_coeff(2 * x, lam_p2);
    poly.add_coeff(3 * x, -1.0);
    return poly;
}

TruncatedSeries zeta_reciprocal(int m, int degree, TruncatedSeries::Key x) {
    TruncatedSeries poly = TruncatedSeries::one(m, degree);
    poly.add_coeff(x, -1.0);
    return poly;
}

TruncatedSeries::Key var(int j) { return TruncatedSeries::Key{1} << (8 * j); }

}  // namespace

TruncatedSeries local_named_factors(std::uint64_t p, int m, int degree,
                                    const EigenvalueTable& eigen) {
    check_local_factor_args(p, m, degree, eigen);
    const double lam_p2 = eigen.lambda_prime_power(p, 2);
    TruncatedSeries out = TruncatedSeries::one(m, degree);
    for (int j = 0; j < m; ++j)
        out = out * sym2_reciprocal(m, degree, lam_p2, 2 * var(j)).inverse();
    for (int l1 = 0; l1 < m; ++l1)
        for (int l2 = l1 + 1; l2 < m; ++l2) {
            const TruncatedSeries::Key pair = var(l1) + var(l2);
            out = out * zeta_reciprocal(m, degree, pair).inverse();
            out = out * sym2_reciprocal(m, degree, lam_p2, pair).inverse();
        }
    return out;
}

TruncatedSeries local_factor_E(std::uint64_t p, int m, int degree, const EigenvalueTable& eigen,
                               bool plus) {
    check_local_factor_args(p, m, degree, eigen);
    const double lam_p2 = eigen.lambda_prime_power(p, 2);
    TruncatedSeries out = local_factor_G(p, m, degree, eigen, plus);
    // divide by the named factors: their inverses are the reciprocal
    // polynomials, so the division is exact truncated-series arithmetic
    for (int j = 0; j < m; ++j) out = out * sym2_reciprocal(m, degree, lam_p2, 2 * var(j));
    for (int l1 = 0; l1 < m; ++l1)
        for (int l2 = l1 + 1; l2 < m; ++l2) {
            const TruncatedSeries::Key pair = var(l1) + var(l2);
            out = out * zeta_reciprocal(m, degree, pair);
            out = out * sym2_reciprocal(m, degree, lam_p2, pair);
        }
    return out;
}

FactorizationReport verify_factorization(std::uint64_t p_max, int m, int degree,
                                         const EigenvalueTable& eigen) {
    FactorizationReport report;
    report.m = m;
    report.degree = degree;
    report.p_max = p_max;
    for (std::uint64_t p = 2; p <= p_max; ++p) {
        if (!is_prime_small(p)) continue;
        const TruncatedSeries direct = local_factor_G(p, m, degree, eigen, false);
        const TruncatedSeries named = local_named_factors(p, m, degree, eigen);
        const TruncatedSeries e_factor = local_factor_E(p, m, degree, eigen, false);
        const TruncatedSeries reconstructed = named * e_factor;
        FactorizationRow row;
        row.p = p;
        row.max_discrepancy = direct.max_abs_diff(reconstructed);
        row.e_degree2_max = e_factor.max_abs_coeff_of_degree(2);
        row.e_degree4_max = e_factor.max_abs_coeff_of_degree(4);
        report.max_discrepancy = std::max(report.max_discrepancy, row.max_discrepancy);
        report.rows.push_back(row);
    }
    return report;
}

namespace {

struct PfContext {
    int m = 0;
    bool plus = false;
    std::uint64_t node_budget = 0;
    std::vector<std::int64_t> n_lo, n_hi;          // inclusive integer ranges per coordinate
    std::vector<double> suffix_max;                // prod of n_hi over coordinates >= i
    std::vector<std::vector<double>> weight;       // weight[i][n - n_lo[i]]
    std::vector<std::uint64_t> kernel_of;          // square-free kernel for n <= max n_hi
    const SpfSieve* spf = nullptr;
};

struct PfWorkerState {
    std::uint32_t prime_stack[128];
    int prime_count = 0;
    double inv_prod = 1.0;
    std::uint64_t nodes = 0;        // nodes visited in the current class
    std::uint64_t nodes_before = 0; // global nodes visited when the class started
    std::uint64_t budget_left = 0;  // per-class remaining budget
    std::uint64_t tuples = 0;
    double subtotal = 0.0;          // per-first-coordinate partial
};

// appends the distinct primes of n that are not already present, updating the
// running prod p/(p+1); returns how many were pushed (for backtracking)
int push_primes(const PfContext& ctx, PfWorkerState& st, std::uint64_t n) {
    int pushed = 0;
    while (n > 1) {
        const std::uint32_t p = ctx.spf->spf[n];
        bool seen = false;
        for (int i = 0; i < st.prime_count; ++i)
            if (st.prime_stack[i] == p) {
                seen = true;
                break;
            }
        if (!seen) {
            st.prime_stack[st.prime_count++] = p;
            st.inv_prod *= one_plus_inv_p_inverse(p);
            ++pushed;
        }
        while (n % p == 0) n /= p;
    }
    return pushed;
}

void pop_primes(PfWorkerState& st, int pushed, double saved_inv_prod) {
    st.prime_count -= pushed;
    st.inv_prod = saved_inv_prod;
}

[[noreturn]] void pf_budget_exhausted(const PfContext& ctx, const PfWorkerState& st) {
    throw BudgetError("pf enumeration exceeded the node budget of " +
                          std::to_string(ctx.node_budget),
                      st.nodes_before + st.nodes, st.tuples);
}

void pf_descend(const PfContext& ctx, PfWorkerState& st, int i, std::uint64_t kernel,
                double wprod) {
    const std::int64_t lo = ctx.n_lo[i], hi = ctx.n_hi[i];
    if (i == ctx.m - 1) {
        // kernel collapse: the last coordinate must be kernel * t^2
        if (hi < 1 || kernel > static_cast<std::uint64_t>(hi)) return;
        // smallest t with kernel * t^2 >= lo
        std::int64_t t = static_cast<std::int64_t>(
            std::floor(std::sqrt(static_cast<double>(lo) / static_cast<double>(kernel))));
        while (t >= 1 &&
               kernel * static_cast<std::uint64_t>(t) * t >= static_cast<std::uint64_t>(lo))
            --t;
        ++t;
        if (t < 1) t = 1;
        for (;; ++t) {
            const std::uint64_t n = kernel * static_cast<std::uint64_t>(t) * t;
            if (n > static_cast<std::uint64_t>(hi)) break;
            if (++st.nodes > st.budget_left) pf_budget_exhausted(ctx, st);
            const double wlast = ctx.weight[i][n - static_cast<std::uint64_t>(lo)];
            const double saved = st.inv_prod;
            const int pushed = push_primes(ctx, st, n);
            st.subtotal += (wprod * wlast) * st.inv_prod;
            ++st.tuples;
            pop_primes(st, pushed, saved);
        }
        return;
    }
    for (std::int64_t n = lo; n <= hi; ++n) {
        if (++st.nodes > st.budget_left) pf_budget_exhausted(ctx, st);
        const std::uint64_t next_kernel = merge_kernels(kernel, ctx.kernel_of[n]);
        // the remaining coordinates must be able to cancel the kernel
        if (static_cast<double>(next_kernel) > ctx.suffix_max[i + 1]) continue;
        const double saved = st.inv_prod;
        const int pushed = push_primes(ctx, st, static_cast<std::uint64_t>(n));
        pf_descend(ctx, st, i + 1, next_kernel,
                   wprod * ctx.weight[i][n - ctx.n_lo[i]]);
        pop_primes(st, pushed, saved);
    }
}

}  // namespace

PfValue pf_bruteforce(std::span<const double> beta, double y, const EigenvalueTable& eigen,
                      const SmoothWeight& w, bool plus, std::uint64_t node_budget, int threads) {
    const int m = static_cast<int>(beta.size());
    if (m < 1) fail(ErrorCode::InvalidArgument, "pf needs arity >= 1");
    if (!(y > 1.0)) fail(ErrorCode::InvalidArgument, "pf needs Y > 1");
    for (const double b : beta)
        if (!(b > 0.0)) fail(ErrorCode::InvalidArgument, "pf exponents must be positive");

    PfContext ctx;
    ctx.m = m;
    ctx.plus = plus;
    ctx.node_budget = node_budget == 0 ? ~std::uint64_t{0} : node_budget;

    std::int64_t n_max = 0;
    for (int i = 0; i < m; ++i) {
        const double scale_i = std::pow(y, beta[i]);
        const double lo = w.support_lo() * scale_i;
        const double hi = w.support_hi() * scale_i;
        // strict interior: the weight vanishes at the endpoints exactly
        const std::int64_t nlo = static_cast<std::int64_t>(std::floor(lo)) + 1;
        const std::int64_t nhi = static_cast<std::int64_t>(std::ceil(hi)) - 1;
        ctx.n_lo.push_back(nlo);
        ctx.n_hi.push_back(std::max<std::int64_t>(nhi, nlo - 1));
        n_max = std::max(n_max, nhi);
    }
    if (n_max > 0 && static_cast<std::uint64_t>(n_max) > eigen.limit)
        fail(ErrorCode::Coverage,
             "eigenvalue table covers n <= " + std::to_string(eigen.limit) +
             " but pf needs n <= " + std::to_string(n_max));

    ctx.suffix_max.assign(m + 1, 1.0);
    for (int i = m - 1; i >= 0; --i)
        ctx.suffix_max[i] = ctx.suffix_max[i + 1] * std::max<double>(ctx.n_hi[i], 0.0);

    PfValue out;
    if (n_max < 1) return out;  // support holds no integers

    const SpfSieve spf = build_spf(static_cast<std::uint64_t>(n_max));
    ctx.spf = &spf;
    ctx.kernel_of.assign(n_max + 1, 1);
    for (std::int64_t n = 2; n <= n_max; ++n) {
        std::uint64_t rest = static_cast<std::uint64_t>(n), kernel = 1;
        while (rest > 1) {
            const std::uint32_t p = spf.spf[rest];
            unsigned e = 0;
            while (rest % p == 0) {
                rest /= p;
                ++e;
            }
            if (e & 1) kernel *= p;
        }
        ctx.kernel_of[n] = kernel;
    }

    ctx.weight.resize(m);
    for (int i = 0; i < m; ++i) {
        const double scale_i = std::pow(y, beta[i]);
        for (std::int64_t n = ctx.n_lo[i]; n <= ctx.n_hi[i]; ++n) {
            const double lam = eigen.lambda(static_cast<std::uint64_t>(n));
            ctx.weight[i].push_back((plus ? std::abs(lam) : lam) *
                                    w(static_cast<double>(n) / scale_i));
        }
    }

    // one partial sum per value of the first coordinate; merge ascending
    const std::int64_t first_lo = ctx.n_lo[0], first_hi = ctx.n_hi[0];
    const std::size_t classes = static_cast<std::size_t>(std::max<std::int64_t>(first_hi - first_lo + 1, 0));
    std::vector<double> partial(classes, 0.0);
    std::vector<std::uint64_t> nodes_by_class(classes, 0), tuples_by_class(classes, 0);

    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> nodes_global{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto run_class = [&](PfWorkerState& st, std::size_t c) {
        st.subtotal = 0.0;
        st.nodes = 0;
        st.tuples = 0;
        st.nodes_before = nodes_global.load(std::memory_order_relaxed);
        st.budget_left = ctx.node_budget > st.nodes_before ? ctx.node_budget - st.nodes_before : 0;
        const std::int64_t n1 = first_lo + static_cast<std::int64_t>(c);
        if (++st.nodes > st.budget_left) pf_budget_exhausted(ctx, st);
        const std::uint64_t kernel = ctx.kernel_of[n1];
        if (m == 1) {
            // the square condition degenerates to n itself being a square
            if (kernel == 1) {
                const double saved = st.inv_prod;
                const int pushed = push_primes(ctx, st, static_cast<std::uint64_t>(n1));
                st.subtotal += ctx.weight[0][c] * st.inv_prod;
                ++st.tuples;
                pop_primes(st, pushed, saved);
            }
        } else if (static_cast<double>(kernel) <= ctx.suffix_max[1]) {
            const double saved = st.inv_prod;
            const int pushed = push_primes(ctx, st, static_cast<std::uint64_t>(n1));
            pf_descend(ctx, st, 1, kernel, ctx.weight[0][c]);
            pop_primes(st, pushed, saved);
        }
        nodes_global.fetch_add(st.nodes, std::memory_order_relaxed);
        partial[c] = st.subtotal;
        nodes_by_class[c] = st.nodes;
        tuples_by_class[c] = st.tuples;
    };

    auto worker_main = [&]() {
        PfWorkerState st;
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= classes || failed.load()) break;
            try {
                run_class(st, c);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                break;
            }
        }
    };

    if (threads <= 1) {
        worker_main();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker_main);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t c = 0; c < classes; ++c) {
        out.value += partial[c];
        out.nodes += nodes_by_class[c];
        out.tuples += tuples_by_class[c];
    }
    return out;
}

PfGrowthTable pf_growth_diagnostic(int m, std::span<const double> y_grid,
                                   const EigenvalueTable& eigen, const SmoothWeight& w, bool plus,
                                   std::uint64_t node_budget, int threads) {
    PfGrowthTable table;
    table.m = m;
    table.envelope_log_exponent = 0.5 * m * (m - 3);
    const std::vector<double> beta(m, 1.0);
    for (const double y : y_grid) {
        const PfValue v = pf_bruteforce(beta, y, eigen, w, plus, node_budget, threads);
        PfGrowthRow row;
        row.y = y;
        row.value = v.value;
        row.tuples = v.tuples;
        row.envelope = std::pow(y, 0.5 * m) * std::pow(std::log(y), table.envelope_log_exponent);
        row.ratio = row.value / row.envelope;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace twistlab
