#ifndef CANHEIGHT_CANHEIGHT_H
#define CANHEIGHT_CANHEIGHT_H

/*
 * C interface to the canonical height library.
 *
 * Results come back as JSON text in a buffer owned by the caller, released
 * with ch_string_free. Reals are JSON strings in scientific notation with a
 * digit count derived from the context precision; rationals are "p/q".
 * A context is not safe to share between threads; maps and polynomials are
 * immutable once built.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define CH_API __attribute__((visibility("default")))
#else
#define CH_API
#endif

typedef enum ch_status {
  CH_OK = 0,
  CH_INVALID_INPUT = 1,
  CH_DEGENERATE_MAP = 2,
  CH_EXCEPTIONAL_TARGET = 3,
  CH_BUDGET_EXCEEDED = 4,
  CH_PRECISION_LOSS = 5,
  CH_COMPUTATION_FAILED = 6,
  CH_INTERNAL_ERROR = 7
} ch_status;

/* Nonzero for CH_INVALID_INPUT and CH_DEGENERATE_MAP. */
CH_API int ch_status_is_input_error(ch_status s);
CH_API const char* ch_status_name(ch_status s);

typedef struct ch_context ch_context;
typedef struct ch_map ch_map;
typedef struct ch_poly ch_poly;

/* Receives each convergence-table row as a JSON object as soon as it is computed. */
typedef void (*ch_row_callback)(const char* row_json, void* user);

CH_API ch_context* ch_context_new(void);
CH_API void ch_context_free(ch_context* ctx);
/* Message of the last failed call on ctx, "" if none. */
CH_API const char* ch_context_last_error(const ch_context* ctx);
/* bits >= 64 */
CH_API ch_status ch_context_set_precision(ch_context* ctx, unsigned long bits);
/* tol > 0 */
CH_API ch_status ch_context_set_tolerance(ch_context* ctx, double tol);
/* Largest d^k for which R_k or S_k is built exactly. */
CH_API ch_status ch_context_set_degree_cap(ch_context* ctx, unsigned long cap);
/* "max" or "fubini-study" */
CH_API ch_status ch_context_set_norm(ch_context* ctx, const char* norm);

CH_API void ch_string_free(char* s);

/* {"d": 2, "P": [...], "Q": [...]}, coefficients of T0^d .. T1^d. */
CH_API ch_status ch_map_from_json(ch_context* ctx, const char* json, ch_map** out);
CH_API ch_status ch_map_from_file(ch_context* ctx, const char* path, ch_map** out);
CH_API void ch_map_free(ch_map* map);
/* Map JSON plus its bad primes. */
CH_API ch_status ch_map_describe(ch_context* ctx, const ch_map* map, char** out);

/* Comma-separated rationals in ascending degree, e.g. "-1,-1,1" for t^2 - t - 1. */
CH_API ch_status ch_poly_parse(ch_context* ctx, const char* text, ch_poly** out);
CH_API void ch_poly_free(ch_poly* poly);

/*
 * Points are "a/b", "n" or "inf"; places are "inf" or a prime; modes are
 * "exact", "numeric" or "auto".
 */
CH_API ch_status ch_height(ch_context* ctx, const ch_map* map, const char* point, char** out);
CH_API ch_status ch_height_algebraic(ch_context* ctx, const ch_map* map, const ch_poly* f, char** out);
CH_API ch_status ch_local_height(ch_context* ctx, const ch_map* map, const char* point, const char* place,
                                 char** out);
CH_API ch_status ch_functional_residual(ch_context* ctx, const ch_map* map, const char* point, const char* place,
                                        char** out);
CH_API ch_status ch_mahler(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* place, char** out);
CH_API ch_status ch_periodic_average(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* place,
                                     unsigned long k, const char* mode, char** out);
CH_API ch_status ch_preimage_average(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* alpha,
                                     const char* place, unsigned long k, const char* mode, char** out);
/* alpha == NULL selects periodic points, otherwise preimages of alpha. */
CH_API ch_status ch_average_series(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* place,
                                   const char* alpha, unsigned long kmin, unsigned long kmax, const char* mode,
                                   ch_row_callback on_row, void* user, char** out);
CH_API ch_status ch_lyapunov(ch_context* ctx, const ch_map* map, unsigned long kmin, unsigned long kmax,
                             const char* mode, ch_row_callback on_row, void* user, char** out);
CH_API ch_status ch_global_identity(ch_context* ctx, const ch_map* map, const ch_poly* f, unsigned long k,
                                    char** out);
CH_API ch_status ch_classify(ch_context* ctx, const ch_map* map, const char* point, unsigned long bound,
                             char** out);
/* Rows n = 1..nmax of the root-of-unity averages for the transcendental tower point. */
CH_API ch_status ch_counterexample(ch_context* ctx, unsigned nmax, ch_row_callback on_row, void* user, char** out);

#ifdef __cplusplus
}
#endif

#endif
