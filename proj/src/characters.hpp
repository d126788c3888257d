#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twistlab {

// Discriminant family for the starred sums: positive fundamental
// discriminants (default), or the odd positive square-free alternative.
enum class Family { Fundamental, OddSquarefree };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Kronecker symbol (d|n) for d != 0, n >= 1, by the standard reciprocity
// reduction (O(log^2) time).
int kronecker(std::int64_t d, std::uint64_t n);

bool is_fundamental(std::int64_t d);  // direct per-integer test of the definition
bool is_squarefree(std::uint64_t n);
bool is_perfect_square(std::uint64_t n);

// Product of the primes dividing n to an odd power; 1 iff n is a square.
std::uint64_t squarefree_kernel(std::uint64_t n);

struct DiscriminantSet {
    Family family = Family::Fundamental;
    double bound = 0.0;
    std::vector<std::int64_t> values;  // sorted ascending, no duplicates

    std::size_t size() const noexcept { return values.size(); }
    bool contains(std::int64_t d) const;
};

// All family members d <= x via a square-free bitmap over [1, x].
DiscriminantSet sieve_discriminants(double x, Family family = Family::Fundamental);

struct CharacterAverageReport {
    std::uint64_t n = 0;
    double x = 0.0;
    double computed_sum = 0.0;  // sum of chi_d(n) over the sieved set (exact +-1/0 sum)
    double main_term = 0.0;     // (6/pi^2) x prod_{p|n} p/(p+1) for square n, else 0
    double residual = 0.0;      // computed_sum - main_term
    std::uint64_t discriminants = 0;
};

CharacterAverageReport character_average(std::uint64_t n, const DiscriminantSet& set);
CharacterAverageReport character_average(std::uint64_t n, double x,
                                         Family family = Family::Fundamental);

// Smallest-prime-factor sieve; drives multiplicative character evaluation
// and factorization of smooth sum indices.
struct SpfSieve {
    std::uint64_t limit = 0;
    std::vector<std::uint32_t> spf;      // spf[n] for 0 <= n <= limit (0 for n < 2)
    std::vector<std::uint32_t> primes;   // primes <= limit, ascending

    // distinct prime factors of n <= limit, appended to out
    void distinct_primes(std::uint64_t n, std::vector<std::uint32_t>& out) const;
};

SpfSieve build_spf(std::uint64_t limit);

}  // namespace twistlab
