#include "twistlab.h"

#include <cstring>
#include <string>

#include "cache.hpp"
#include "characters.hpp"
#include "eigenvalues.hpp"
#include "error.hpp"
#include "kernels.hpp"
#include "moments.hpp"
#include "smooth_weight.hpp"
#include "square_series.hpp"

struct twistlab_eigen {
    twistlab::EigenvalueTable table;
};
struct twistlab_discs {
    twistlab::DiscriminantSet set;
};
struct twistlab_weight {
    twistlab::SmoothWeight w;
};

namespace {

thread_local std::string g_last_error;

twistlab_status map_code(twistlab::ErrorCode code) {
    using twistlab::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return TWISTLAB_ERR_INVALID_ARGUMENT;
        case ErrorCode::UnsupportedForm: return TWISTLAB_ERR_UNSUPPORTED_FORM;
        case ErrorCode::Coverage: return TWISTLAB_ERR_COVERAGE;
        case ErrorCode::Budget: return TWISTLAB_ERR_BUDGET;
        case ErrorCode::Quadrature: return TWISTLAB_ERR_QUADRATURE;
        case ErrorCode::Invariant: return TWISTLAB_ERR_INVARIANT;
        case ErrorCode::Io: return TWISTLAB_ERR_IO;
        case ErrorCode::Internal: return TWISTLAB_ERR_INTERNAL;
    }
    return TWISTLAB_ERR_INTERNAL;
}

template <class Fn>
twistlab_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return TWISTLAB_OK;
    } catch (const twistlab::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TWISTLAB_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return TWISTLAB_ERR_INTERNAL;
    }
}

twistlab::Family to_family(twistlab_family f) {
    return f == TWISTLAB_FAMILY_ODD_SQUAREFREE ? twistlab::Family::OddSquarefree
                                               : twistlab::Family::Fundamental;
}

twistlab::MomentKind to_kind(twistlab_moment_kind k) {
    switch (k) {
        case TWISTLAB_MOMENT_S: return twistlab::MomentKind::SmoothedS;
        case TWISTLAB_MOMENT_T_SHARP: return twistlab::MomentKind::SharpT;
        default: return twistlab::MomentKind::SmoothedT;
    }
}

void require(bool ok, const char* what) {
    if (!ok) twistlab::fail(twistlab::ErrorCode::InvalidArgument, what);
}

}  // namespace

extern "C" {

const char* twistlab_version(void) { return "0.1.0"; }

const char* twistlab_last_error(void) { return g_last_error.c_str(); }

twistlab_status twistlab_eigen_build(int weight, uint64_t limit, twistlab_eigen** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        auto table = twistlab::build_integer_coefficients(weight, limit);
        twistlab::normalize(table);
        *out = new twistlab_eigen{std::move(table)};
    });
}

twistlab_status twistlab_eigen_cached(const char* cache_dir, int weight, uint64_t limit,
                                      twistlab_eigen** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        const std::string dir = cache_dir && *cache_dir ? cache_dir : twistlab::default_cache_dir();
        *out = new twistlab_eigen{twistlab::cached_eigen_table(dir, weight, limit)};
    });
}

twistlab_status twistlab_eigen_save(const twistlab_eigen* table, const char* path) {
    return guarded([&] {
        require(table != nullptr && path != nullptr, "null argument");
        twistlab::save_eigen_table(table->table, path);
    });
}

uint64_t twistlab_eigen_limit(const twistlab_eigen* table) {
    return table ? table->table.limit : 0;
}

twistlab_status twistlab_eigen_raw(const twistlab_eigen* table, uint64_t n, char* buf,
                                   size_t bufsize) {
    return guarded([&] {
        require(table != nullptr && buf != nullptr, "null argument");
        require(n >= 1 && n <= table->table.limit, "index out of table range");
        const std::string s = table->table.raw[n].get_str();
        require(s.size() + 1 <= bufsize, "buffer too small for the coefficient");
        std::memcpy(buf, s.c_str(), s.size() + 1);
    });
}

twistlab_status twistlab_eigen_lambda(const twistlab_eigen* table, uint64_t n, double* out) {
    return guarded([&] {
        require(table != nullptr && out != nullptr, "null argument");
        *out = table->table.lambda(n);
    });
}

twistlab_status twistlab_eigen_satake(const twistlab_eigen* table, uint64_t p, double alpha[2],
                                      double beta[2]) {
    return guarded([&] {
        require(table != nullptr && alpha != nullptr && beta != nullptr, "null argument");
        const auto pair = twistlab::satake(table->table, p);
        alpha[0] = pair.alpha.real();
        alpha[1] = pair.alpha.imag();
        beta[0] = pair.beta.real();
        beta[1] = pair.beta.imag();
    });
}

twistlab_status twistlab_eigen_verify_hecke(const twistlab_eigen* table, uint64_t* violations) {
    return guarded([&] {
        require(table != nullptr && violations != nullptr, "null argument");
        *violations = twistlab::verify_hecke(table->table).size();
    });
}

twistlab_status twistlab_eigen_verify_deligne(const twistlab_eigen* table, uint64_t* violations) {
    return guarded([&] {
        require(table != nullptr && violations != nullptr, "null argument");
        *violations = twistlab::verify_deligne(table->table).size();
    });
}

void twistlab_eigen_free(twistlab_eigen* table) { delete table; }

twistlab_status twistlab_kronecker(int64_t d, uint64_t n, int* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = twistlab::kronecker(d, n);
    });
}

twistlab_status twistlab_squarefree_kernel(uint64_t n, uint64_t* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = twistlab::squarefree_kernel(n);
    });
}

twistlab_status twistlab_discs_sieve(double x, twistlab_family family, twistlab_discs** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = new twistlab_discs{twistlab::sieve_discriminants(x, to_family(family))};
    });
}

twistlab_status twistlab_discs_cached(const char* cache_dir, double x, twistlab_family family,
                                      twistlab_discs** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        const std::string dir = cache_dir && *cache_dir ? cache_dir : twistlab::default_cache_dir();
        *out = new twistlab_discs{twistlab::cached_discriminants(dir, x, to_family(family))};
    });
}

twistlab_status twistlab_discs_save(const twistlab_discs* set, const char* path) {
    return guarded([&] {
        require(set != nullptr && path != nullptr, "null argument");
        twistlab::save_discriminants(set->set, path);
    });
}

uint64_t twistlab_discs_count(const twistlab_discs* set) { return set ? set->set.size() : 0; }

int64_t twistlab_discs_get(const twistlab_discs* set, uint64_t index) {
    if (!set || index >= set->set.size()) return 0;
    return set->set.values[index];
}

void twistlab_discs_free(twistlab_discs* set) { delete set; }

twistlab_status twistlab_char_average(uint64_t n, double x, twistlab_family family,
                                      twistlab_char_average_report* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        const auto report = twistlab::character_average(n, x, to_family(family));
        *out = {report.n,         report.x,        report.computed_sum,
                report.main_term, report.residual, report.discriminants};
    });
}

twistlab_status twistlab_weight_bump(double a, double b, twistlab_weight** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = new twistlab_weight{twistlab::SmoothWeight(a, b)};
    });
}

twistlab_status twistlab_weight_parse(const char* spec, twistlab_weight** out) {
    return guarded([&] {
        require(out != nullptr && spec != nullptr, "null argument");
        *out = new twistlab_weight{twistlab::SmoothWeight::parse(spec)};
    });
}

twistlab_status twistlab_weight_scaled(const twistlab_weight* w, double c, twistlab_weight** out) {
    return guarded([&] {
        require(w != nullptr && out != nullptr, "null argument");
        *out = new twistlab_weight{w->w.scaled(c)};
    });
}

double twistlab_weight_eval(const twistlab_weight* w, double x) { return w ? w->w(x) : 0.0; }

twistlab_status twistlab_weight_mellin(const twistlab_weight* w, double s_re, double s_im,
                                       double tol, double value[2], double* quad_error) {
    return guarded([&] {
        require(w != nullptr && value != nullptr, "null argument");
        const auto mv = twistlab::mellin(w->w, {s_re, s_im}, tol);
        value[0] = mv.value.real();
        value[1] = mv.value.imag();
        if (quad_error) *quad_error = mv.quadrature_error;
    });
}

twistlab_status twistlab_weight_decay_sup(const twistlab_weight* w, int order, double sigma_lo,
                                          double sigma_hi, double t_max, double* sup) {
    return guarded([&] {
        require(w != nullptr && sup != nullptr, "null argument");
        *sup = twistlab::verify_decay(w->w, order, sigma_lo, sigma_hi, t_max).sup;
    });
}

void twistlab_weight_free(twistlab_weight* w) { delete w; }

twistlab_status twistlab_twisted_sum(int64_t d, double y, const twistlab_eigen* table,
                                     const twistlab_weight* w, double* value,
                                     uint64_t* terms_used) {
    return guarded([&] {
        require(table != nullptr && w != nullptr && value != nullptr, "null argument");
        const auto ts = twistlab::twisted_sum(d, y, table->table, w->w);
        *value = ts.value;
        if (terms_used) *terms_used = ts.terms_used;
    });
}

twistlab_status twistlab_moment(twistlab_moment_kind kind, double x, double y, double m,
                                twistlab_family family, const twistlab_eigen* table,
                                const twistlab_weight* w, const twistlab_discs* discs,
                                int threads, twistlab_moment_report* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        const auto report = twistlab::moment(
            to_kind(kind), x, y, m, to_family(family), table ? &table->table : nullptr,
            w ? &w->w : nullptr, discs ? &discs->set : nullptr, threads);
        *out = {report.x,     report.y,         report.m,     report.moment,
                report.discriminants, report.predicted, report.ratio, report.seconds};
    });
}

twistlab_status twistlab_holder(double x, double y, int m, double epsilon,
                                twistlab_family family, const twistlab_eigen* table,
                                const twistlab_weight* w, const twistlab_discs* discs,
                                int threads, twistlab_holder_report* out) {
    return guarded([&] {
        require(table != nullptr && w != nullptr && out != nullptr, "null argument");
        const auto triple =
            twistlab::holder_check(x, y, m, epsilon, to_family(family), table->table, w->w,
                                   discs ? &discs->set : nullptr, threads);
        *out = {triple.h1, triple.h2, triple.tm, triple.m, triple.epsilon, triple.slack};
    });
}

twistlab_status twistlab_verify_factorization(uint64_t p_max, int m, int degree,
                                              const twistlab_eigen* table,
                                              double* max_discrepancy) {
    return guarded([&] {
        require(table != nullptr && max_discrepancy != nullptr, "null argument");
        *max_discrepancy =
            twistlab::verify_factorization(p_max, m, degree, table->table).max_discrepancy;
    });
}

twistlab_status twistlab_pf(const double* beta, int m, double y, const twistlab_eigen* table,
                            const twistlab_weight* w, int plus, uint64_t node_budget,
                            int threads, twistlab_pf_report* out) {
    return guarded([&] {
        require(beta != nullptr && table != nullptr && w != nullptr && out != nullptr,
                "null argument");
        require(m >= 1, "pf arity must be >= 1");
        const auto value =
            twistlab::pf_bruteforce(std::span<const double>(beta, static_cast<size_t>(m)), y,
                                    table->table, w->w, plus != 0, node_budget, threads);
        *out = {value.value, value.nodes, value.tuples};
    });
}

double twistlab_g1(double t, double x) { return twistlab::g1(t, {x, 10.0}); }

double twistlab_g2(double t, double x) { return twistlab::g2(t, {x, 10.0}); }

twistlab_status twistlab_region_integral(int m, int region, double x, double b, uint64_t samples,
                                         uint64_t seed, int threads, twistlab_mc_estimate* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        const auto est = twistlab::region_integral(m, region, {x, b}, samples, seed, threads);
        *out = {est.value, est.std_error, est.samples};
    });
}

}  // extern "C"
