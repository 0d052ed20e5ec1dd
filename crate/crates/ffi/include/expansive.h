#ifndef EXPANSIVE_H
#define EXPANSIVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes of every fallible call.
typedef enum ExpStatus {
  EXP_STATUS_OK = 0,
  EXP_STATUS_NULL_POINTER = 1,
  EXP_STATUS_INVALID_UTF8 = 2,
  EXP_STATUS_INVALID_ARGUMENT = 3,
  EXP_STATUS_PARSE = 4,
  EXP_STATUS_COMPUTATION = 5,
  EXP_STATUS_PANIC = 6,
} ExpStatus;

// Opaque handle to a built system.
typedef struct ExpSystem ExpSystem;

// Index window of a truncation.
typedef struct ExpBounds {
  int64_t lo;
  int64_t hi;
  uint32_t depth;
  uint32_t samples;
} ExpBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call into the library on the same thread.
const char *exp_last_error(void);

// Builds a system of `family` from a JSON parameter object (`params_json`
// may be null for families without parameters).
//
// # Safety
// `family` and `params_json` must be null or valid C strings; `out` must
// point to writable storage for a handle.
enum ExpStatus exp_system_build(const char *family,
                                const char *params_json,
                                struct ExpSystem **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `sys` must be null or a handle from `exp_system_build` not yet freed.
void exp_system_free(struct ExpSystem *sys);

// Frees a string returned by the library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void exp_string_free(char *s);

// Canonical parameters of the system as JSON.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum ExpStatus exp_system_params(const struct ExpSystem *sys, char **out);

// Cantor-Bendixson rank in Cantor normal form, e.g. `2` or `w`.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum ExpStatus exp_system_rank(const struct ExpSystem *sys, char **out);

// Companion set of `point` at threshold `delta` (a fraction such as
// `1/8`) over the truncation `bounds` with `horizon`, as JSON. The number of
// members is also stored in `count` when it is not null.
//
// # Safety
// Pointers must be valid as described; `bounds` must point to an `ExpBounds`.
enum ExpStatus exp_companions(const struct ExpSystem *sys,
                              const struct ExpBounds *bounds,
                              uint32_t horizon,
                              const char *delta,
                              const char *point,
                              bool two_sided,
                              size_t *count,
                              char **out);

// Runs a named claim; `n = 0` uses the claim's default levels. Writes the
// verdict to `ok` and the full report JSON to `out`.
//
// # Safety
// `name` must be a valid C string; `ok` and `out` must be writable.
enum ExpStatus exp_verify_claim(const char *name, uint32_t n, bool *ok, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EXPANSIVE_H */
