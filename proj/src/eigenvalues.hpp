#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <vector>

namespace twistlab {

// Fourier coefficients of the weight-12 level-1 cusp form (the discriminant
// form; a(n) is Ramanujan's tau), kept as exact integers, plus the normalized
// eigenvalues lambda(n) = a(n) / n^((weight-1)/2) satisfying lambda(1) = 1,
// |lambda(n)| <= d(n), and the Hecke relations
//   lambda(mn) = lambda(m) lambda(n)          for (m, n) = 1,
//   lambda(p) lambda(p^r) = lambda(p^{r+1}) + lambda(p^{r-1}).
struct EigenvalueTable {
    int weight = 0;
    std::uint64_t limit = 0;
    std::vector<mpz_class> raw;      // raw[n] = a(n); raw[0] unused
    std::vector<double> normalized;  // normalized[n] = lambda(n); empty until normalize()

    bool normalized_ready() const noexcept { return !normalized.empty(); }

    // lambda(n) for 1 <= n <= limit; throws Coverage beyond the table.
    double lambda(std::uint64_t n) const;

    // lambda(p^r) for any r >= 0 via the prime-power recursion; needs p <= limit.
    double lambda_prime_power(std::uint64_t p, unsigned r) const;
};

// Satake parameters at p: the roots of x^2 - lambda(p) x + 1, so
// alpha + beta = lambda(p), alpha beta = 1, |alpha| = |beta| = 1.
struct SatakePair {
    std::uint64_t p;
    std::complex<double> alpha;
    std::complex<double> beta;
};

struct HeckeViolation {
    std::uint64_t m, n;   // multiplicativity pair, or (p, p^{r+1}) for the recursion
    double discrepancy;
};

struct DeligneViolation {
    std::uint64_t n;
    double lambda_abs;
    std::uint64_t divisor_count;
};

// Exact a(n) for 1 <= n <= limit by expanding q prod (1-q^n)^24: the
// pentagonal-number expansion of prod (1-q^n) followed by repeated squaring
// of the truncated series. Only weight 12 is available.
EigenvalueTable build_integer_coefficients(int weight, std::uint64_t limit);

// Fills table.normalized from the raw integers.
void normalize(EigenvalueTable& table);

SatakePair satake(const EigenvalueTable& table, std::uint64_t p);

// Exact integer verification of multiplicativity and the raw prime-power
// recursion a(p) a(p^r) = a(p^{r+1}) + p^{weight-1} a(p^{r-1}).
std::vector<HeckeViolation> verify_hecke(const EigenvalueTable& table);

// |lambda(n)| <= d(n) against an independently sieved divisor-count table.
std::vector<DeligneViolation> verify_deligne(const EigenvalueTable& table);

std::vector<std::uint32_t> divisor_count_sieve(std::uint64_t limit);

}  // namespace twistlab
