#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "characters.hpp"
#include "eigenvalues.hpp"
#include "multi_series.hpp"
#include "smooth_weight.hpp"

namespace twistlab {

// g(n_1, ..., n_m) = prod_i lambda(n_i) * prod_{p | n_1...n_m} (1 + 1/p)^{-1}
// restricted to n_1...n_m being a perfect square (0 otherwise); the plus
// variant replaces lambda by |lambda|.
double g_value(std::span<const std::uint64_t> idx, const EigenvalueTable& eigen, bool plus);

// Dirichlet coefficients b(n) of L(s, sym^2 f) = zeta(2s) sum lambda(n^2) n^{-s}:
// b(n) = sum_{k^2 | n} lambda((n/k^2)^2). Needs eigen coverage up to limit^2.
struct SymSquareCoefficients {
    std::uint64_t limit = 0;
    std::vector<double> values;  // values[n] = b(n), 1-based
};
SymSquareCoefficients sym_square_coefficients(const EigenvalueTable& eigen, std::uint64_t limit);

// Local factor at p of the m-variable Dirichlet series of g (or g+): the
// coefficient at exponent tuple (v_1, ..., v_m) is g(p^{v_1}, ..., p^{v_m}).
TruncatedSeries local_factor_G(std::uint64_t p, int m, int degree, const EigenvalueTable& eigen,
                               bool plus);

// The product of the named local factors the G series factors through:
//   prod_j L_p(2s_j, sym^2 f) * prod_{l1<l2} zeta_p(s_l1+s_l2) L_p(s_l1+s_l2, sym^2 f),
// each expanded by truncated series inversion of its reciprocal polynomial.
TruncatedSeries local_named_factors(std::uint64_t p, int m, int degree,
                                    const EigenvalueTable& eigen);

// Local E factor: the G factor divided by the named factors (realized as a
// product with the truncations of their inverses, which are polynomials).
TruncatedSeries local_factor_E(std::uint64_t p, int m, int degree, const EigenvalueTable& eigen,
                               bool plus);

struct FactorizationRow {
    std::uint64_t p = 0;
    double max_discrepancy = 0.0;     // coefficientwise |G - named*E|
    double e_degree2_max = 0.0;       // largest |E coefficient| at total degree 2
    double e_degree4_max = 0.0;       // largest |E coefficient| at total degree 4
};

struct FactorizationReport {
    int m = 0;
    int degree = 0;
    std::uint64_t p_max = 0;
    double max_discrepancy = 0.0;
    std::vector<FactorizationRow> rows;
};

// For every prime p <= p_max, reconstructs the local G factor as
// (named local factors) * (local E factor) in truncated series arithmetic
// and compares it coefficientwise against local_factor_G.
FactorizationReport verify_factorization(std::uint64_t p_max, int m, int degree,
                                         const EigenvalueTable& eigen);

// Brute-force P_f(Y^{beta_1}, ..., Y^{beta_m}): the exact sum over tuples with
// square product of prod_i lambda(n_i) Phi(n_i / Y^{beta_i}) * prod_{p | n_1...n_m} (1+1/p)^{-1}.
// Enumerates by recursion carrying the running square-free kernel; branches
// whose kernel cannot be cancelled by the remaining coordinates are pruned,
// and the last coordinate runs only over kernel * t^2.
struct PfValue {
    double value = 0.0;
    std::uint64_t nodes = 0;   // enumeration nodes visited
    std::uint64_t tuples = 0;  // tuples with square product that contributed
};
PfValue pf_bruteforce(std::span<const double> beta, double y, const EigenvalueTable& eigen,
                      const SmoothWeight& w, bool plus, std::uint64_t node_budget,
                      int threads = 1);

struct PfGrowthRow {
    double y = 0.0;
    double value = 0.0;
    double envelope = 0.0;  // Y^{m/2} (log Y)^{m(m-3)/2}
    double ratio = 0.0;
    std::uint64_t tuples = 0;
};
struct PfGrowthTable {
    int m = 0;
    double envelope_log_exponent = 0.0;  // m(m-3)/2
    std::vector<PfGrowthRow> rows;
};

// P_f on a Y grid with equal exponents beta_i = 1, against the reference envelope.
PfGrowthTable pf_growth_diagnostic(int m, std::span<const double> y_grid,
                                   const EigenvalueTable& eigen, const SmoothWeight& w, bool plus,
                                   std::uint64_t node_budget, int threads = 1);

}  // namespace twistlab
