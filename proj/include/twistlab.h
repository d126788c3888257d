/*
 * twistlab — a computational laboratory for quadratic-twist character sums:
 * exact Hecke eigenvalues of the weight-12 cusp form, fundamental-discriminant
 * sieves, smoothed twisted moments, the square-product Euler factorization,
 * and the piecewise kernel integrals.
 *
 * C API: opaque handles plus plain error codes. Every function that can fail
 * returns a twistlab_status; twistlab_last_error() gives a thread-local
 * message for the most recent failure on the calling thread.
 */
#ifndef TWISTLAB_H
#define TWISTLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TWISTLAB_API __declspec(dllexport)
#else
#define TWISTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum twistlab_status {
    TWISTLAB_OK = 0,
    TWISTLAB_ERR_INVALID_ARGUMENT = 1,
    TWISTLAB_ERR_UNSUPPORTED_FORM = 2,
    TWISTLAB_ERR_COVERAGE = 3, /* a table does not reach far enough */
    TWISTLAB_ERR_BUDGET = 4,   /* enumeration exceeded its node budget */
    TWISTLAB_ERR_QUADRATURE = 5,
    TWISTLAB_ERR_INVARIANT = 6, /* an unconditional identity failed: a bug */
    TWISTLAB_ERR_IO = 7,
    TWISTLAB_ERR_INTERNAL = 8
} twistlab_status;

typedef enum twistlab_family {
    TWISTLAB_FAMILY_FUNDAMENTAL = 0,
    TWISTLAB_FAMILY_ODD_SQUAREFREE = 1
} twistlab_family;

typedef enum twistlab_moment_kind {
    TWISTLAB_MOMENT_T = 0,       /* smoothed, lambda-twisted */
    TWISTLAB_MOMENT_S = 1,       /* smoothed character sums, lambda == 1 */
    TWISTLAB_MOMENT_T_SHARP = 2  /* sharp cutoff n <= Y */
} twistlab_moment_kind;

typedef struct twistlab_eigen twistlab_eigen;   /* Hecke eigenvalue table */
typedef struct twistlab_discs twistlab_discs;   /* discriminant family <= X */
typedef struct twistlab_weight twistlab_weight; /* smooth compactly supported weight */

TWISTLAB_API const char* twistlab_version(void);
TWISTLAB_API const char* twistlab_last_error(void);

/* -------- Hecke eigenvalues (weight-12 discriminant form) -------- */

TWISTLAB_API twistlab_status twistlab_eigen_build(int weight, uint64_t limit,
                                                  twistlab_eigen** out);
/* load from the cache directory if a valid cache exists, else build and persist */
TWISTLAB_API twistlab_status twistlab_eigen_cached(const char* cache_dir, int weight,
                                                   uint64_t limit, twistlab_eigen** out);
TWISTLAB_API twistlab_status twistlab_eigen_save(const twistlab_eigen* table, const char* path);
TWISTLAB_API uint64_t twistlab_eigen_limit(const twistlab_eigen* table);
/* exact integer a(n) as a decimal string */
TWISTLAB_API twistlab_status twistlab_eigen_raw(const twistlab_eigen* table, uint64_t n,
                                                char* buf, size_t bufsize);
/* normalized lambda(n) = a(n) / n^((weight-1)/2) */
TWISTLAB_API twistlab_status twistlab_eigen_lambda(const twistlab_eigen* table, uint64_t n,
                                                   double* out);
/* roots of x^2 - lambda(p) x + 1 as (re, im) pairs */
TWISTLAB_API twistlab_status twistlab_eigen_satake(const twistlab_eigen* table, uint64_t p,
                                                   double alpha[2], double beta[2]);
TWISTLAB_API twistlab_status twistlab_eigen_verify_hecke(const twistlab_eigen* table,
                                                         uint64_t* violations);
TWISTLAB_API twistlab_status twistlab_eigen_verify_deligne(const twistlab_eigen* table,
                                                           uint64_t* violations);
TWISTLAB_API void twistlab_eigen_free(twistlab_eigen* table);

/* -------- quadratic characters and discriminant families -------- */

TWISTLAB_API twistlab_status twistlab_kronecker(int64_t d, uint64_t n, int* out);
/* product of the primes dividing n to an odd power (1 iff n is a square) */
TWISTLAB_API twistlab_status twistlab_squarefree_kernel(uint64_t n, uint64_t* out);

TWISTLAB_API twistlab_status twistlab_discs_sieve(double x, twistlab_family family,
                                                  twistlab_discs** out);
TWISTLAB_API twistlab_status twistlab_discs_cached(const char* cache_dir, double x,
                                                   twistlab_family family, twistlab_discs** out);
TWISTLAB_API twistlab_status twistlab_discs_save(const twistlab_discs* set, const char* path);
TWISTLAB_API uint64_t twistlab_discs_count(const twistlab_discs* set);
TWISTLAB_API int64_t twistlab_discs_get(const twistlab_discs* set, uint64_t index);
TWISTLAB_API void twistlab_discs_free(twistlab_discs* set);

typedef struct twistlab_char_average_report {
    uint64_t n;
    double x;
    double computed_sum; /* exact integer sum of chi_d(n) over the family */
    double main_term;    /* (6/pi^2) X prod_{p|n} p/(p+1) for square n, else 0 */
    double residual;     /* computed_sum - main_term */
    uint64_t discriminants;
} twistlab_char_average_report;

TWISTLAB_API twistlab_status twistlab_char_average(uint64_t n, double x, twistlab_family family,
                                                   twistlab_char_average_report* out);

/* -------- smooth weights and Mellin transforms -------- */

TWISTLAB_API twistlab_status twistlab_weight_bump(double a, double b, twistlab_weight** out);
/* weight spec strings, e.g. "bump:1,2" */
TWISTLAB_API twistlab_status twistlab_weight_parse(const char* spec, twistlab_weight** out);
TWISTLAB_API twistlab_status twistlab_weight_scaled(const twistlab_weight* w, double c,
                                                    twistlab_weight** out);
TWISTLAB_API double twistlab_weight_eval(const twistlab_weight* w, double x);
/* integral over (0,inf) of phi(x) x^(s-1) dx; value = (re, im) */
TWISTLAB_API twistlab_status twistlab_weight_mellin(const twistlab_weight* w, double s_re,
                                                    double s_im, double tol, double value[2],
                                                    double* quad_error);
/* sup over the grid of |phihat(sigma+it)| (1+|t|)^order, order <= 4 */
TWISTLAB_API twistlab_status twistlab_weight_decay_sup(const twistlab_weight* w, int order,
                                                       double sigma_lo, double sigma_hi,
                                                       double t_max, double* sup);
TWISTLAB_API void twistlab_weight_free(twistlab_weight* w);

/* -------- moments of twisted sums -------- */

typedef struct twistlab_moment_report {
    double x, y, m;
    double moment;
    uint64_t discriminants;
    double predicted; /* X Y^(m/2) (log X)^e, diagnostic envelope */
    double ratio;
    double seconds;
} twistlab_moment_report;

/* H_d(Y) = sum_n chi_d(n) lambda(n) phi(n/Y) */
TWISTLAB_API twistlab_status twistlab_twisted_sum(int64_t d, double y,
                                                  const twistlab_eigen* table,
                                                  const twistlab_weight* w, double* value,
                                                  uint64_t* terms_used);
/* discs may be NULL (the family is then sieved on the fly); eigen may be NULL
 * for the S kind; w may be NULL for the sharp kind */
TWISTLAB_API twistlab_status twistlab_moment(twistlab_moment_kind kind, double x, double y,
                                             double m, twistlab_family family,
                                             const twistlab_eigen* table,
                                             const twistlab_weight* w,
                                             const twistlab_discs* discs, int threads,
                                             twistlab_moment_report* out);

typedef struct twistlab_holder_report {
    double h1, h2, tm;
    int m;
    double epsilon;
    double slack; /* H2^(m-1) Tm - H1^m, nonnegative up to rounding */
} twistlab_holder_report;

TWISTLAB_API twistlab_status twistlab_holder(double x, double y, int m, double epsilon,
                                             twistlab_family family, const twistlab_eigen* table,
                                             const twistlab_weight* w,
                                             const twistlab_discs* discs, int threads,
                                             twistlab_holder_report* out);

/* -------- square-product Dirichlet series -------- */

TWISTLAB_API twistlab_status twistlab_verify_factorization(uint64_t p_max, int m, int degree,
                                                           const twistlab_eigen* table,
                                                           double* max_discrepancy);

typedef struct twistlab_pf_report {
    double value;
    uint64_t nodes;
    uint64_t tuples;
} twistlab_pf_report;

/* beta is an array of m positive exponents; budget 0 means unlimited */
TWISTLAB_API twistlab_status twistlab_pf(const double* beta, int m, double y,
                                         const twistlab_eigen* table, const twistlab_weight* w,
                                         int plus, uint64_t node_budget, int threads,
                                         twistlab_pf_report* out);

/* -------- kernel integrals -------- */

TWISTLAB_API double twistlab_g1(double t, double x);
TWISTLAB_API double twistlab_g2(double t, double x);

typedef struct twistlab_mc_estimate {
    double value;
    double std_error;
    uint64_t samples;
} twistlab_mc_estimate;

/* region is 1, 2 or 3: [0, 1/(2 log X)], [1/(2 log X), 5], [5, B] */
TWISTLAB_API twistlab_status twistlab_region_integral(int m, int region, double x, double b,
                                                      uint64_t samples, uint64_t seed,
                                                      int threads, twistlab_mc_estimate* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TWISTLAB_H */
