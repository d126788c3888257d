#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>

namespace twistlab {

// Truncated multivariate formal power series with real coefficients, stored
// sparsely and keyed by exponent tuples of bounded total degree. Arity is at
// most 8 and every exponent fits in a byte, so a tuple packs into one
// uint64 (variable j occupies byte j); packed keys add without carries.
class TruncatedSeries {
public:
    static constexpr int kMaxArity = 8;
    using Key = std::uint64_t;

    TruncatedSeries(int arity, int degree_cap);

    static TruncatedSeries one(int arity, int degree_cap);

    static Key pack(std::span<const unsigned> exponents);
    static Key pack(std::initializer_list<unsigned> exponents);
    static unsigned total_degree(Key key);
    static unsigned exponent(Key key, int var) { return (key >> (8 * var)) & 0xff; }

    int arity() const noexcept { return arity_; }
    int degree_cap() const noexcept { return degree_cap_; }

    double coeff(Key key) const;
    double coeff(std::initializer_list<unsigned> exponents) const { return coeff(pack(exponents)); }
    void set_coeff(Key key, double value);
    void add_coeff(Key key, double value);

    TruncatedSeries operator+(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-(const TruncatedSeries& rhs) const;
    TruncatedSeries operator*(const TruncatedSeries& rhs) const;  // discards degree > cap

    // Multiplicative inverse via the geometric series in (f - c)/c; requires a
    // nonzero constant term.
    TruncatedSeries inverse() const;

    double max_abs_diff(const TruncatedSeries& rhs) const;
    double max_abs_coeff_of_degree(unsigned degree) const;

    const std::map<Key, double>& terms() const noexcept { return terms_; }

private:
    int arity_;
    int degree_cap_;
    std::map<Key, double> terms_;  // ordered keys keep every traversal deterministic
};

}  // namespace twistlab
