#include "eigenvalues.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"

namespace twistlab {

namespace {

// Truncated integer power series c[0..deg]; multiplication skips zero
// coefficients, which makes the sparse stages (the pentagonal series and its
// cube) cheap without special-casing them.
using ZSeries = std::vector<mpz_class>;

ZSeries zseries(std::size_t deg) { return ZSeries(deg + 1); }

void series_square(const ZSeries& a, ZSeries& out) {
    const std::size_t deg = a.size() - 1;
    for (auto& c : out) c = 0;
    for (std::size_t i = 0; i <= deg; ++i) {
        if (mpz_sgn(a[i].get_mpz_t()) == 0) continue;
        if (2 * i <= deg)
            mpz_addmul(out[2 * i].get_mpz_t(), a[i].get_mpz_t(), a[i].get_mpz_t());
        for (std::size_t j = i + 1; i + j <= deg; ++j) {
            if (mpz_sgn(a[j].get_mpz_t()) == 0) continue;
            mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), a[j].get_mpz_t());
            mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), a[j].get_mpz_t());
        }
    }
}

void series_mul(const ZSeries& a, const ZSeries& b, ZSeries& out) {
    const std::size_t deg = a.size() - 1;
    for (auto& c : out) c = 0;
    for (std::size_t i = 0; i <= deg; ++i) {
        if (mpz_sgn(a[i].get_mpz_t()) == 0) continue;
        for (std::size_t j = 0; i + j <= deg; ++j) {
            if (mpz_sgn(b[j].get_mpz_t()) == 0) continue;
            mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
        }
    }
}

// prod_{n>=1} (1 - q^n) truncated at degree deg, by the pentagonal number
// theorem: sum_k (-1)^k q^{k(3k-1)/2} over k in Z.
ZSeries pentagonal_series(std::size_t deg) {
    ZSeries e = zseries(deg);
    e[0] = 1;
    for (std::uint64_t k = 1;; ++k) {
        const std::uint64_t g1 = k * (3 * k - 1) / 2;
        const std::uint64_t g2 = k * (3 * k + 1) / 2;
        if (g1 > deg && g2 > deg) break;
        const int s = (k % 2 != 0) ? -1 : 1;
        if (g1 <= deg) e[g1] = s;
        if (g2 <= deg) e[g2] = s;
    }
    return e;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t p = 3; p * p <= n; p += 2)
        if (n % p == 0) return false;
    return true;
}

}  // namespace

EigenvalueTable build_integer_coefficients(int weight, std::uint64_t limit) {
    if (weight != 12)
        fail(ErrorCode::UnsupportedForm,
             "form not available: only the weight-12 discriminant form is built in "
             "(requested weight " + std::to_string(weight) + ")");
    if (limit == 0)
        fail(ErrorCode::InvalidArgument, "empty table: limit must be at least 1");

    EigenvalueTable table;
    table.weight = weight;
    table.limit = limit;
    table.raw.resize(limit + 1);

    // a(n) is the q^{n-1} coefficient of prod (1-q^n)^24; power chain
    // 1 -> 2 -> 3 -> 6 -> 12 -> 24.
    const std::size_t deg = static_cast<std::size_t>(limit - 1);
    ZSeries e = pentagonal_series(deg);
    ZSeries t1 = zseries(deg), t2 = zseries(deg);
    series_square(e, t1);       // E^2
    series_mul(t1, e, t2);      // E^3 (sparse again, by Jacobi's identity)
    { ZSeries().swap(e); }
    series_square(t2, t1);      // E^6
    series_square(t1, t2);      // E^12
    series_square(t2, t1);      // E^24

    for (std::uint64_t n = 1; n <= limit; ++n)
        table.raw[n] = t1[static_cast<std::size_t>(n - 1)];
    return table;
}

void normalize(EigenvalueTable& table) {
    if (table.raw.empty())
        fail(ErrorCode::InvalidArgument, "normalize: raw coefficients are not present");
    const double half = (table.weight - 1) / 2.0;
    table.normalized.assign(table.limit + 1, 0.0);
    table.normalized[1] = 1.0;  // exact
    for (std::uint64_t n = 2; n <= table.limit; ++n)
        table.normalized[n] =
            mpz_get_d(table.raw[n].get_mpz_t()) / std::pow(static_cast<double>(n), half);
}

double EigenvalueTable::lambda(std::uint64_t n) const {
    if (n == 0 || n > limit)
        fail(ErrorCode::Coverage,
             "eigenvalue table covers n <= " + std::to_string(limit) +
             " but lambda(" + std::to_string(n) + ") was requested");
    if (!normalized_ready())
        fail(ErrorCode::InvalidArgument, "eigenvalue table is not normalized");
    return normalized[n];
}

double EigenvalueTable::lambda_prime_power(std::uint64_t p, unsigned r) const {
    if (r == 0) return 1.0;
    const double lp = lambda(p);
    if (r == 1) return lp;
    double prev = 1.0, cur = lp;
    for (unsigned k = 1; k < r; ++k) {
        const double next = lp * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

SatakePair satake(const EigenvalueTable& table, std::uint64_t p) {
    if (!is_prime_u64(p))
        fail(ErrorCode::InvalidArgument, "satake: " + std::to_string(p) + " is not prime");
    const double lp = table.lambda(p);
    if (std::abs(lp) > 2.0)
        fail(ErrorCode::Invariant,
             "|lambda(" + std::to_string(p) + ")| = " + std::to_string(std::abs(lp)) +
             " > 2 contradicts the Deligne bound");
    const double im = std::sqrt(std::max(0.0, 4.0 - lp * lp)) / 2.0;
    SatakePair pair{p, {lp / 2.0, im}, {lp / 2.0, -im}};
    if (std::abs(std::abs(pair.alpha) - 1.0) > 1e-12 ||
        std::abs(std::abs(pair.beta) - 1.0) > 1e-12)
        fail(ErrorCode::Invariant, "satake parameters drifted off the unit circle");
    return pair;
}

std::vector<HeckeViolation> verify_hecke(const EigenvalueTable& table) {
    std::vector<HeckeViolation> out;
    const std::uint64_t n_max = table.limit;
    mpz_class lhs, rhs;

    // multiplicativity over coprime pairs, exact integers
    for (std::uint64_t m = 2; m * m <= n_max; ++m) {
        for (std::uint64_t n = m + 1; m * n <= n_max; ++n) {
            if (std::gcd(m, n) != 1) continue;
            lhs = table.raw[m] * table.raw[n];
            rhs = table.raw[m * n] - lhs;
            if (rhs != 0)
                out.push_back({m, n, std::abs(mpz_get_d(rhs.get_mpz_t()))});
        }
    }

    // prime-power recursion a(p) a(p^r) = a(p^{r+1}) + p^{k-1} a(p^{r-1})
    mpz_class pk1;
    for (std::uint64_t p = 2; p * p <= n_max; ++p) {
        if (!is_prime_u64(p)) continue;
        mpz_ui_pow_ui(pk1.get_mpz_t(), p, static_cast<unsigned>(table.weight - 1));
        std::uint64_t pr = p;  // p^r
        std::uint64_t prm1 = 1;
        while (pr <= n_max / p) {
            lhs = table.raw[p] * table.raw[pr];
            rhs = table.raw[pr * p] + pk1 * table.raw[prm1];
            if (lhs != rhs) {
                mpz_class diff = lhs - rhs;
                out.push_back({p, pr * p, std::abs(mpz_get_d(diff.get_mpz_t()))});
            }
            prm1 = pr;
            pr *= p;
        }
    }
    return out;
}

std::vector<DeligneViolation> verify_deligne(const EigenvalueTable& table) {
    std::vector<DeligneViolation> out;
    const auto divisors = divisor_count_sieve(table.limit);
    const double half = (table.weight - 1) / 2.0;
    for (std::uint64_t n = 1; n <= table.limit; ++n) {
        const double lam =
            table.normalized_ready()
                ? table.normalized[n]
                : mpz_get_d(table.raw[n].get_mpz_t()) / std::pow(static_cast<double>(n), half);
        if (std::abs(lam) > static_cast<double>(divisors[n]))
            out.push_back({n, std::abs(lam), divisors[n]});
    }
    return out;
}

std::vector<std::uint32_t> divisor_count_sieve(std::uint64_t limit) {
    std::vector<std::uint32_t> d(limit + 1, 0);
    for (std::uint64_t i = 1; i <= limit; ++i)
        for (std::uint64_t j = i; j <= limit; j += i) ++d[j];
    return d;
}

}  // namespace twistlab
