#include "characters.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "error.hpp"

namespace twistlab {

std::string family_name(Family f) {
    return f == Family::Fundamental ? "fundamental" : "odd-squarefree";
}

Family family_from_name(const std::string& name) {
    if (name == "fundamental") return Family::Fundamental;
    if (name == "odd-squarefree") return Family::OddSquarefree;
    fail(ErrorCode::InvalidArgument, "unknown discriminant family '" + name + "'");
}

int kronecker(std::int64_t d, std::uint64_t n) {
    if (d == 0)
        fail(ErrorCode::InvalidArgument, "kronecker symbol needs a nonzero discriminant");
    std::int64_t a = d;
    std::uint64_t b = n;
    if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((static_cast<std::uint64_t>(a) | b) % 2 == 0) return 0;  // both even

    int k = 1;
    // strip the 2-part of the denominator using (a|2), which is 0 for even a
    // and depends on a mod 8 otherwise
    const int v2 = std::countr_zero(b);
    b >>= v2;
    if (v2 & 1) {
        const int r = static_cast<int>(((a % 8) + 8) % 8);
        if (r == 3 || r == 5) k = -k;
    }
    for (;;) {
        // b odd, b >= 1
        a %= static_cast<std::int64_t>(b);
        if (a < 0) a += static_cast<std::int64_t>(b);
        // a in [0, b)
        if (a == 0) return (b > 1) ? 0 : k;
        std::uint64_t ua = static_cast<std::uint64_t>(a);
        const int v = std::countr_zero(ua);
        ua >>= v;
        if (v & 1) {
            const int r = static_cast<int>(b % 8);
            if (r == 3 || r == 5) k = -k;
        }
        // quadratic reciprocity for odd positive ua, b
        if ((ua & 2) && (b & 2)) k = -k;
        const std::uint64_t t = b % ua;
        b = ua;
        a = static_cast<std::int64_t>(t);
    }
}

bool is_squarefree(std::uint64_t n) {
    if (n == 0) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return false;
    }
    return true;
}

bool is_fundamental(std::int64_t d) {
    if (d <= 0) return false;
    const std::uint64_t u = static_cast<std::uint64_t>(d);
    if (u % 4 == 1) return is_squarefree(u);
    if (u % 4 == 0) {
        const std::uint64_t n = u / 4;
        return (n % 4 == 2 || n % 4 == 3) && is_squarefree(n);
    }
    return false;
}

bool is_perfect_square(std::uint64_t n) {
    const std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    for (std::uint64_t s = (r > 1 ? r - 1 : 0); s <= r + 1; ++s)
        if (s * s == n) return true;
    return false;
}

std::uint64_t squarefree_kernel(std::uint64_t n) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "squarefree_kernel(0)");
    std::uint64_t kernel = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e & 1) kernel *= p;
    }
    if (n > 1) kernel *= n;  // remaining prime to the first power
    return kernel;
}

bool DiscriminantSet::contains(std::int64_t d) const {
    return std::binary_search(values.begin(), values.end(), d);
}

DiscriminantSet sieve_discriminants(double x, Family family) {
    if (!(x >= 1.0))
        fail(ErrorCode::InvalidArgument, "sieve bound must be at least 1");
    const std::uint64_t bound = static_cast<std::uint64_t>(std::floor(x));

    // square-free bitmap over [1, bound]
    std::vector<bool> squarefull(bound + 1, false);
    for (std::uint64_t p = 2; p * p <= bound; ++p)
        for (std::uint64_t q = p * p; q <= bound; q += p * p) squarefull[q] = true;

    DiscriminantSet set;
    set.family = family;
    set.bound = x;
    if (family == Family::Fundamental) {
        // pass 1: odd d == 1 (mod 4); d = 1 is admitted (the trivial character)
        for (std::uint64_t d = 1; d <= bound; d += 4)
            if (!squarefull[d]) set.values.push_back(static_cast<std::int64_t>(d));
        // pass 2: d = 4n with n square-free, n == 2, 3 (mod 4)
        for (std::uint64_t n = 2; 4 * n <= bound; ++n) {
            const auto r = n % 4;
            if ((r == 2 || r == 3) && !squarefull[n])
                set.values.push_back(static_cast<std::int64_t>(4 * n));
        }
        std::sort(set.values.begin(), set.values.end());
    } else {
        for (std::uint64_t d = 1; d <= bound; d += 2)
            if (!squarefull[d]) set.values.push_back(static_cast<std::int64_t>(d));
    }
    return set;
}

CharacterAverageReport character_average(std::uint64_t n, const DiscriminantSet& set) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "character_average needs n >= 1");
    std::int64_t sum = 0;  // exact: each term is -1, 0 or 1
    for (const std::int64_t d : set.values) sum += kronecker(d, n);

    CharacterAverageReport report;
    report.n = n;
    report.x = set.bound;
    report.computed_sum = static_cast<double>(sum);
    report.discriminants = set.size();
    if (is_perfect_square(n)) {
        double local = 1.0;
        std::uint64_t rest = n;
        for (std::uint64_t p = 2; p * p <= rest; ++p) {
            if (rest % p != 0) continue;
            local *= static_cast<double>(p) / static_cast<double>(p + 1);
            while (rest % p == 0) rest /= p;
        }
        if (rest > 1) local *= static_cast<double>(rest) / static_cast<double>(rest + 1);
        report.main_term = (6.0 / (M_PI * M_PI)) * set.bound * local;
    }
    report.residual = report.computed_sum - report.main_term;
    return report;
}

CharacterAverageReport character_average(std::uint64_t n, double x, Family family) {
    return character_average(n, sieve_discriminants(x, family));
}

void SpfSieve::distinct_primes(std::uint64_t n, std::vector<std::uint32_t>& out) const {
    while (n > 1) {
        const std::uint32_t p = spf[n];
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
}

SpfSieve build_spf(std::uint64_t limit) {
    SpfSieve sieve;
    sieve.limit = limit;
    sieve.spf.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (sieve.spf[i] == 0) {
            sieve.primes.push_back(static_cast<std::uint32_t>(i));
            for (std::uint64_t j = i; j <= limit; j += i)
                if (sieve.spf[j] == 0) sieve.spf[j] = static_cast<std::uint32_t>(i);
        }
    }
    return sieve;
}

}  // namespace twistlab
