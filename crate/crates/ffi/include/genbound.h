#ifndef GENBOUND_H
#define GENBOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GbStatus {
  GB_STATUS_OK = 0,
  GB_STATUS_NULL_POINTER = 1,
  GB_STATUS_INVALID_ARGUMENT = 2,
  GB_STATUS_GUARD_EXCEEDED = 3,
  GB_STATUS_OVERFLOW = 4,
  GB_STATUS_PARSE = 5,
  GB_STATUS_INVALID_SETTING = 6,
  GB_STATUS_INTERNAL = 7,
  GB_STATUS_PANIC = 8,
} GbStatus;

/**
 * Opaque handle to a learning setting.
 */
typedef struct GbSetting GbSetting;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gb_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *gb_last_error(void);

/**
 * Override the exact-state guard for every later call; 0 restores the
 * default.
 */
void gb_set_max_states(uint64_t cap);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gb_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GbStatus gb_setting_from_json(const char *json, struct GbSetting **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum GbStatus gb_setting_random(uint64_t seed, struct GbSetting **out);

/**
 * The partition construction on `{0,1}^d` with blocks of size `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GbStatus gb_setting_counterexample(uint32_t d, uint32_t n, struct GbSetting **out);

/**
 * # Safety
 * `h` must come from this library and not have been freed.
 */
void gb_setting_free(struct GbSetting *h);

/**
 * # Safety
 * `h` must be a live handle; the out pointers must be writable.
 */
enum GbStatus gb_setting_sizes(const struct GbSetting *h,
                               size_t *data_size,
                               size_t *n,
                               size_t *hypotheses);

/**
 * Setting document as JSON.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum GbStatus gb_setting_to_json(const struct GbSetting *h, char **out);

/**
 * `E[R - r_S]` and `E[(R - r_S)^2]` as doubles.
 *
 * # Safety
 * `h` must be a live handle; the out pointers must be writable.
 */
enum GbStatus gb_gap_moments(const struct GbSetting *h, double *gap, double *squared);

/**
 * Every standard-setting bound as a JSON array; `sigma = sigma_num / sigma_den`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum GbStatus gb_bounds_report_json(const struct GbSetting *h,
                                    int64_t sigma_num,
                                    int64_t sigma_den,
                                    char **out);

/**
 * The supersample report as JSON.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum GbStatus gb_cmi_report_json(const struct GbSetting *h, char **out);

/**
 * Counterexample certification; `monte_carlo` selects sampling with
 * `trials` draws from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GbStatus gb_verify_counterexample_json(uint32_t n,
                                            uint32_t d,
                                            bool monte_carlo,
                                            uint64_t trials,
                                            uint64_t seed,
                                            char **out);

/**
 * One covariance row for `N0` zeros, `N1` ones, and blocks of size `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GbStatus gb_lemma_cov_json(uint32_t n0, uint32_t n1, uint32_t n, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENBOUND_H */
