/* C interface to the zkowf experiment harness. */

#ifndef ZKOWF_H
#define ZKOWF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible functions.
 */
typedef enum ZkowfStatus {
  /**
   * The call succeeded.
   */
  ZKOWF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ZKOWF_STATUS_NULL_ARGUMENT = 1,
  /**
   * The config text failed to parse or was not valid UTF-8.
   */
  ZKOWF_STATUS_PARSE_ERROR = 2,
  /**
   * The experiment failed to run.
   */
  ZKOWF_STATUS_RUN_ERROR = 3,
} ZkowfStatus;

/**
 * An experiment's verdict, mirrored as plain integers for C callers.
 */
typedef enum ZkowfVerdict {
  ZKOWF_VERDICT_BOUND_HOLDS = 0,
  ZKOWF_VERDICT_BOUND_VIOLATED = 1,
  ZKOWF_VERDICT_INCONCLUSIVE = 2,
} ZkowfVerdict;

/**
 * Opaque parsed experiment config.
 */
typedef struct ZkowfConfig ZkowfConfig;

/**
 * Opaque experiment result.
 */
typedef struct ZkowfResult ZkowfResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a NUL-terminated config document into a new handle.
 *
 * On success writes the handle through `out` and returns `Ok`; on failure
 * leaves `out` untouched and records an error message.
 *
 * # Safety
 * `text` must point to a NUL-terminated string and `out` to writable
 * memory for one pointer.
 */
enum ZkowfStatus zkowf_config_parse(const char *text, struct ZkowfConfig **out);

/**
 * Release a config handle. A null handle is a no-op.
 *
 * # Safety
 * `cfg` must be null or a handle from `zkowf_config_parse` not yet freed.
 */
void zkowf_config_free(struct ZkowfConfig *cfg);

/**
 * Run the experiment a config describes with the given seed.
 *
 * On success writes a result handle through `out`. The config handle
 * remains valid and may be reused.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` writable memory for one
 * pointer.
 */
enum ZkowfStatus zkowf_experiment_run(const struct ZkowfConfig *cfg,
                                      uint64_t seed,
                                      struct ZkowfResult **out);

/**
 * The verdict of a result. A null handle reports `Inconclusive`.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
enum ZkowfVerdict zkowf_result_verdict(const struct ZkowfResult *result);

/**
 * Render a result as its archival JSON document.
 *
 * Returns a heap string the caller releases with `zkowf_string_free`, or
 * null on a null handle.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
char *zkowf_result_json(const struct ZkowfResult *result);

/**
 * Release a result handle. A null handle is a no-op.
 *
 * # Safety
 * `result` must be null or a handle from `zkowf_experiment_run` not yet
 * freed.
 */
void zkowf_result_free(struct ZkowfResult *result);

/**
 * Release a string returned by this library. A null pointer is a no-op.
 *
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void zkowf_string_free(char *s);

/**
 * The message of the calling thread's most recent error, as a heap string
 * released with `zkowf_string_free`; null if no error has occurred.
 */
char *zkowf_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZKOWF_H */
