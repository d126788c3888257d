#include "multi_series.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace twistlab {

TruncatedSeries::TruncatedSeries(int arity, int degree_cap)
    : arity_(arity), degree_cap_(degree_cap) {
    if (arity < 1 || arity > kMaxArity)
        fail(ErrorCode::InvalidArgument,
             "series arity must be in [1, " + std::to_string(kMaxArity) + "]");
    if (degree_cap < 0 || degree_cap > 255)
        fail(ErrorCode::InvalidArgument, "series degree cap must be in [0, 255]");
}

TruncatedSeries TruncatedSeries::one(int arity, int degree_cap) {
    TruncatedSeries s(arity, degree_cap);
    s.terms_[0] = 1.0;
    return s;
}

TruncatedSeries::Key TruncatedSeries::pack(std::span<const unsigned> exponents) {
    Key key = 0;
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (exponents[j] > 0xff) fail(ErrorCode::InvalidArgument, "exponent exceeds 255");
        key |= static_cast<Key>(exponents[j]) << (8 * j);
    }
    return key;
}

TruncatedSeries::Key TruncatedSeries::pack(std::initializer_list<unsigned> exponents) {
    return pack(std::span<const unsigned>(exponents.begin(), exponents.size()));
}

unsigned TruncatedSeries::total_degree(Key key) {
    unsigned d = 0;
    while (key) {
        d += key & 0xff;
        key >>= 8;
    }
    return d;
}

double TruncatedSeries::coeff(Key key) const {
    const auto it = terms_.find(key);
    return it == terms_.end() ? 0.0 : it->second;
}

void TruncatedSeries::set_coeff(Key key, double value) {
    if (total_degree(key) > static_cast<unsigned>(degree_cap_)) return;
    if (value == 0.0)
        terms_.erase(key);
    else
        terms_[key] = value;
}

void TruncatedSeries::add_coeff(Key key, double value) {
    if (total_degree(key) > static_cast<unsigned>(degree_cap_)) return;
    terms_[key] += value;
}

namespace {
void check_compatible(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.arity() != b.arity() || a.degree_cap() != b.degree_cap())
        fail(ErrorCode::InvalidArgument, "series arity/degree mismatch");
}
}  // namespace

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& rhs) const {
    check_compatible(*this, rhs);
    TruncatedSeries out = *this;
    for (const auto& [k, v] : rhs.terms_) out.add_coeff(k, v);
    return out;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& rhs) const {
    check_compatible(*this, rhs);
    TruncatedSeries out = *this;
    for (const auto& [k, v] : rhs.terms_) out.add_coeff(k, -v);
    return out;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& rhs) const {
    check_compatible(*this, rhs);
    TruncatedSeries out(arity_, degree_cap_);
    const unsigned cap = static_cast<unsigned>(degree_cap_);
    for (const auto& [ka, va] : terms_) {
        const unsigned da = total_degree(ka);
        for (const auto& [kb, vb] : rhs.terms_) {
            if (da + total_degree(kb) > cap) continue;
            out.terms_[ka + kb] += va * vb;  // byte-wise add, no carries below the cap
        }
    }
    return out;
}

TruncatedSeries TruncatedSeries::inverse() const {
    const double c = coeff(0);
    if (c == 0.0)
        fail(ErrorCode::InvalidArgument, "series inverse needs a nonzero constant term");
    // f = c (1 + g) with g of positive valuation; 1/f = (1/c) sum_j (-g)^j.
    TruncatedSeries g(arity_, degree_cap_);
    for (const auto& [k, v] : terms_)
        if (k != 0) g.terms_[k] = v / c;

    TruncatedSeries out = one(arity_, degree_cap_);
    TruncatedSeries power = one(arity_, degree_cap_);
    for (int j = 1; j <= degree_cap_; ++j) {
        power = power * g;
        if (power.terms_.empty()) break;
        const double sign = (j % 2 != 0) ? -1.0 : 1.0;
        for (const auto& [k, v] : power.terms_) out.add_coeff(k, sign * v);
    }
    for (auto& [k, v] : out.terms_) v /= c;
    return out;
}

double TruncatedSeries::max_abs_diff(const TruncatedSeries& rhs) const {
    check_compatible(*this, rhs);
    double worst = 0.0;
    for (const auto& [k, v] : terms_) worst = std::max(worst, std::abs(v - rhs.coeff(k)));
    for (const auto& [k, v] : rhs.terms_) worst = std::max(worst, std::abs(v - coeff(k)));
    return worst;
}

double TruncatedSeries::max_abs_coeff_of_degree(unsigned degree) const {
    double worst = 0.0;
    for (const auto& [k, v] : terms_)
        if (total_degree(k) == degree) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace twistlab
