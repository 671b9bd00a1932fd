#ifndef VARFL_H
#define VARFL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible call.
 */
typedef enum VarflStatus {
  VARFL_STATUS_OK = 0,
  VARFL_STATUS_NULL_POINTER = 1,
  VARFL_STATUS_INVALID_UTF8 = 2,
  VARFL_STATUS_INVALID_INPUT = 3,
  VARFL_STATUS_PRECONDITION = 4,
  VARFL_STATUS_INTERNAL = 5,
} VarflStatus;

/*
 Opaque handle to a loaded dataset.
 */
typedef struct VarflSession VarflSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Loads and cross-validates a dataset from the three JSON documents.

 # Safety
 The string arguments must be NUL-terminated; `out` must be writable.
 */
enum VarflStatus varfl_session_new(const char *system_json,
                                   const char *products_json,
                                   const char *spectra_json,
                                   struct VarflSession **out);

/*
 Releases a session. Null is ignored.

 # Safety
 `session` must come from [`varfl_session_new`] and not be used again.
 */
void varfl_session_free(struct VarflSession *session);

/*
 Runs a technique and writes the ranked-list JSON to `out_json`.
 `options_json` may be null for defaults.

 # Safety
 `session` must be live; `options_json` null or NUL-terminated;
 `out_json` writable.
 */
enum VarflStatus varfl_localize(const struct VarflSession *session,
                                const char *options_json,
                                char **out_json);

/*
 Detects suspicious partial configurations of size at most `k` and
 writes them as a JSON array.

 # Safety
 `session` must be live; `out_json` writable.
 */
enum VarflStatus varfl_detect_spcs(const struct VarflSession *session, uint32_t k, char **out_json);

/*
 Evaluates a ranked-list JSON against a ground-truth JSON whose ids are
 checked against the session's system. Writes the report JSON.

 # Safety
 `session` must be live; strings NUL-terminated; `out_json` writable.
 */
enum VarflStatus varfl_evaluate(const struct VarflSession *session,
                                const char *ranked_json,
                                const char *truth_json,
                                char **out_json);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used again.
 */
void varfl_string_free(char *s);

/*
 Message of the last failed call on this thread, or null. Valid until
 the next call into the library on the same thread.
 */
const char *varfl_last_error_message(void);

/*
 Library version, static storage.
 */
const char *varfl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VARFL_H */
