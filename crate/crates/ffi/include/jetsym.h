#ifndef JETSYM_H
#define JETSYM_H

/* Generated by cbindgen from the jetsym-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum JetsymStatus {
  JETSYM_STATUS_OK = 0,
  /**
   * The call succeeded and at least one check failed.
   */
  JETSYM_STATUS_CHECK_FAILED = 1,
  JETSYM_STATUS_NULL_ARGUMENT = 2,
  JETSYM_STATUS_INVALID_UTF8 = 3,
  JETSYM_STATUS_PARSE_ERROR = 4,
  JETSYM_STATUS_NOT_FOUND = 5,
  JETSYM_STATUS_ENGINE_ERROR = 6,
  JETSYM_STATUS_RESOURCE_CAP = 7,
  JETSYM_STATUS_PANIC = 8,
} JetsymStatus;

typedef enum JetsymFormat {
  JETSYM_FORMAT_TEXT = 0,
  JETSYM_FORMAT_JSON = 1,
  JETSYM_FORMAT_LATEX = 2,
} JetsymFormat;

/**
 * Parsed model.
 */
typedef struct JetsymModel JetsymModel;

/**
 * Result of one or more checks.
 */
typedef struct JetsymReport JetsymReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *jetsym_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, not yet freed.
 */
void jetsym_string_free(char *s);

/**
 * Parses model source text.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JetsymStatus jetsym_model_parse(const char *src, struct JetsymModel **out);

/**
 * Loads a built-in model: `gardner` or `potential_burgers`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JetsymStatus jetsym_model_builtin(const char *name, struct JetsymModel **out);

/**
 * # Safety
 * `model` must be null or a handle from this library, not yet freed.
 */
void jetsym_model_free(struct JetsymModel *model);

/**
 * Canonical source text of the model.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum JetsymStatus jetsym_model_to_source(const struct JetsymModel *model, char **out);

/**
 * SHA-256 of the canonical source, in hex.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum JetsymStatus jetsym_model_hash(const struct JetsymModel *model, char **out);

/**
 * Checks that a named characteristic is a symmetry of a named system.
 *
 * # Safety
 * `model` must be a live handle, the names NUL-terminated strings and
 * `out` a valid pointer.
 */
enum JetsymStatus jetsym_check_symmetry(const struct JetsymModel *model,
                                        const char *characteristic,
                                        const char *system,
                                        struct JetsymReport **out);

/**
 * Checks that a named density is conserved by a named system.
 *
 * # Safety
 * As for [`jetsym_check_symmetry`].
 */
enum JetsymStatus jetsym_check_conservation(const struct JetsymModel *model,
                                            const char *density,
                                            const char *system,
                                            struct JetsymReport **out);

/**
 * Checks that two named operators form a Hamiltonian pair.
 *
 * # Safety
 * As for [`jetsym_check_symmetry`].
 */
enum JetsymStatus jetsym_check_pair(const struct JetsymModel *model,
                                    const char *op1,
                                    const char *op2,
                                    struct JetsymReport **out);

/**
 * Nonzero when every check in the report passed.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int jetsym_report_passed(const struct JetsymReport *report);

/**
 * Renders a report.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum JetsymStatus jetsym_report_render(const struct JetsymReport *report,
                                       enum JetsymFormat format,
                                       char **out);

/**
 * # Safety
 * `report` must be null or a handle from this library, not yet freed.
 */
void jetsym_report_free(struct JetsymReport *report);

/**
 * Runs the command-line interface with `argv[0..argc]` (without the
 * program name). Writes the process exit code to `exit_code` and the
 * output streams to `out` and `err`, either of which may be null.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `exit_code` must be a
 * valid pointer.
 */
enum JetsymStatus jetsym_run(size_t argc,
                             const char *const *argv,
                             int *exit_code,
                             char **out,
                             char **err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JETSYM_H */
