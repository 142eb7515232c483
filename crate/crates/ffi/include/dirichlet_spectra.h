#ifndef DIRICHLET_SPECTRA_H
#define DIRICHLET_SPECTRA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  /**
   * An explicit-constant check failed or its hypotheses were not met.
   */
  DS_STATUS_CHECK_FAILED = 1,
  DS_STATUS_INVALID_ARGUMENT = 2,
  DS_STATUS_PARSE = 3,
  DS_STATUS_COMPUTATION = 4,
  DS_STATUS_IO = 5,
  DS_STATUS_PANIC = 6,
} DsStatus;

/**
 * Parsed domain.
 */
typedef struct DsDomain DsDomain;

/**
 * Solved eigenproblem.
 */
typedef struct DsEigen DsEigen;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *ds_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ds_version(void);

/**
 * Parse a domain description (`dim=2`, `rect ...`, `disc ...`, `preset ...`).
 *
 * # Safety
 * `text_ptr` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsStatus ds_domain_parse(const char *text_ptr, struct DsDomain **out);

/**
 * Build a preset domain such as `dumbbell(2, 0.2)`.
 *
 * # Safety
 * `expr` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsStatus ds_domain_preset(const char *expr, struct DsDomain **out);

/**
 * # Safety
 * `domain` must come from `ds_domain_parse`/`ds_domain_preset` or be NULL.
 */
void ds_domain_free(struct DsDomain *domain);

/**
 * Solve on a grid of width `h`, or in closed form when `h <= 0`. A positive `count`
 * asks for that many pairs; otherwise every eigenvalue up to `tmax`.
 *
 * # Safety
 * `domain` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_solve(const struct DsDomain *domain,
                       double h,
                       size_t count,
                       double tmax,
                       struct DsEigen **out);

/**
 * # Safety
 * `eig` must come from `ds_solve` or be NULL.
 */
void ds_eigen_free(struct DsEigen *eig);

/**
 * Number of eigenpairs held; 0 for a NULL handle.
 *
 * # Safety
 * `eig` must be a live handle or NULL.
 */
size_t ds_eigen_len(const struct DsEigen *eig);

/**
 * Copy up to `cap` eigenvalues into `values`; returns the number copied.
 *
 * # Safety
 * `values` must have room for `cap` doubles.
 */
size_t ds_eigen_values(const struct DsEigen *eig, double *values, size_t cap);

/**
 * `L^1`, `L^2` and `L^inf` norms of eigenfunction `k` (0-based).
 *
 * # Safety
 * `eig` must be a live handle; output pointers must be valid.
 */
enum DsStatus ds_eigen_norms(const struct DsEigen *eig,
                             size_t k,
                             double *l1,
                             double *l2,
                             double *linf);

/**
 * `N_t`, the number of eigenvalues at or below `t`.
 *
 * # Safety
 * `eig` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_counting(const struct DsEigen *eig, double t, size_t *out);

/**
 * Heat trace `Z(t)` and a bound on the omitted tail.
 *
 * # Safety
 * `eig` must be a live handle; output pointers must be valid.
 */
enum DsStatus ds_heat_trace(const struct DsEigen *eig, double t, double *value, double *tail);

/**
 * Heat content `Q(t)` and a bound on the omitted tail.
 *
 * # Safety
 * `eig` must be a live handle; output pointers must be valid.
 */
enum DsStatus ds_heat_content(const struct DsEigen *eig, double t, double *value, double *tail);

/**
 * Run checks (comma-separated ids, or NULL for the default selection) and return the
 * verdict JSON in `*json`, to be released with `ds_string_free`. Returns
 * `DS_STATUS_CHECK_FAILED` when an explicit check fails; the JSON is still produced.
 *
 * # Safety
 * `eig` must be a live handle, `checks` NULL or a NUL-terminated string, `json` valid.
 */
enum DsStatus ds_verify(struct DsEigen *eig, const char *checks, char **json);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void ds_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRICHLET_SPECTRA_H */
