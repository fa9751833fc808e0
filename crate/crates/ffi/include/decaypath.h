#ifndef DECAYPATH_H
#define DECAYPATH_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpStatus {
  DP_STATUS_OK = 0,
  DP_STATUS_NULL_POINTER = 1,
  DP_STATUS_INVALID_UTF8 = 2,
  DP_STATUS_PARSE = 3,
  DP_STATUS_VALIDATION = 4,
  DP_STATUS_DIMENSION = 5,
  DP_STATUS_DOMAIN = 6,
  DP_STATUS_WRONG_CLASS = 7,
  DP_STATUS_NON_CONVERGENCE = 8,
  DP_STATUS_OVERFLOW = 9,
  DP_STATUS_CONSTRUCTION = 10,
  DP_STATUS_INDEX_OUT_OF_RANGE = 11,
  DP_STATUS_INTERNAL = 12,
} DpStatus;

/**
 * Validated network specification.
 */
typedef struct DpNetwork DpNetwork;

/**
 * Path table `σ` on a grid that starts at 0.
 */
typedef struct DpPathTable DpPathTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dp_last_error_message(void);

/**
 * Parses a network document (JSON, format version 1). Templates are
 * expanded at `truncation` (0 selects the template's own size). The
 * network is validated before it is returned.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DpStatus dp_network_from_json(const char *json, size_t truncation, struct DpNetwork **out);

/**
 * # Safety
 * `net` must come from [`dp_network_from_json`] and not be freed twice.
 */
void dp_network_free(struct DpNetwork *net);

/**
 * Number of nodes, 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t dp_network_size(const struct DpNetwork *net);

/**
 * `out = Γ(s)`; `s` and `out` hold `len = n` entries.
 *
 * # Safety
 * `s` and `out` must point to `len` doubles.
 */
enum DpStatus dp_eval_gamma(const struct DpNetwork *net, const double *s, size_t len, double *out);

/**
 * `out = s ⊕ Γ(s)`.
 *
 * # Safety
 * `s` and `out` must point to `len` doubles.
 */
enum DpStatus dp_eval_gamma_hat(const struct DpNetwork *net,
                                const double *s,
                                size_t len,
                                double *out);

/**
 * `out = r𝟙 ⊕ Γ(s)`.
 *
 * # Safety
 * `s` and `out` must point to `len` doubles.
 */
enum DpStatus dp_eval_gamma_r(const struct DpNetwork *net,
                              double r,
                              const double *s,
                              size_t len,
                              double *out);

/**
 * Minimal fixed point `σ_*(r)` of `Γᵣ`. `tol ≤ 0` and `kmax = 0` select
 * the defaults (1e-10, 100000).
 *
 * # Safety
 * `out` must point to `len ≥ n` doubles.
 */
enum DpStatus dp_sigma_star(const struct DpNetwork *net,
                            double r,
                            double tol,
                            size_t kmax,
                            double *out,
                            size_t len);

/**
 * Spectral radius of a linear gain operator with Collatz–Wielandt bounds.
 * Any output pointer may be null.
 *
 * # Safety
 * Non-null outputs must be valid.
 */
enum DpStatus dp_spectral_radius(const struct DpNetwork *net,
                                 double *value,
                                 double *lower,
                                 double *upper);

/**
 * Sampled small-gain check. `*falsified` is set to 1 when some `s ≠ 0`
 * with `Γ(s) ≥ s` was found, in which case the witness is copied to
 * `witness` (may be null).
 *
 * # Safety
 * `falsified` must be valid; a non-null `witness` must hold `len ≥ n` doubles.
 */
enum DpStatus dp_check_sgc(const struct DpNetwork *net,
                           size_t samples,
                           uint64_t seed,
                           int32_t *falsified,
                           double *witness,
                           size_t len);

/**
 * Builds `σ_*` on `grid` (positive, strictly increasing; 0 is prepended).
 *
 * # Safety
 * `grid` must point to `grid_len` doubles and `out` be valid.
 */
enum DpStatus dp_path_table_build(const struct DpNetwork *net,
                                  const double *grid,
                                  size_t grid_len,
                                  double tol,
                                  size_t kmax,
                                  struct DpPathTable **out);

/**
 * # Safety
 * `t` must come from [`dp_path_table_build`] and not be freed twice.
 */
void dp_path_table_free(struct DpPathTable *t);

/**
 * Grid length including the leading 0; 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t dp_path_table_grid_len(const struct DpPathTable *t);

/**
 * Copies grid point `k` to `*r` and `σ(grid[k])` to `out`.
 *
 * # Safety
 * `r` must be valid or null; `out` must hold `len ≥ n` doubles.
 */
enum DpStatus dp_path_table_sigma(const struct DpPathTable *t,
                                  size_t k,
                                  double *r,
                                  double *out,
                                  size_t len);

/**
 * `σᵢ(r)` by linear interpolation; `*out_of_range` (may be null) is set
 * when `r` lies past the last grid point.
 *
 * # Safety
 * `value` must be valid.
 */
enum DpStatus dp_path_table_eval(const struct DpPathTable *t,
                                 size_t i,
                                 double r,
                                 double *value,
                                 int32_t *out_of_range);

/**
 * `σᵢ⁻¹(v)`, exact on each segment.
 *
 * # Safety
 * `value` must be valid.
 */
enum DpStatus dp_path_table_inverse(const struct DpPathTable *t,
                                    size_t i,
                                    double v,
                                    double *value,
                                    int32_t *out_of_range);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DECAYPATH_H */
