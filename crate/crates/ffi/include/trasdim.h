#ifndef TRASDIM_H
#define TRASDIM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TrasdimStatus {
  TRASDIM_STATUS_OK = 0,
  TRASDIM_STATUS_NULL_POINTER = 1,
  TRASDIM_STATUS_INVALID_UTF8 = 2,
  TRASDIM_STATUS_INVALID_JSON = 3,
  TRASDIM_STATUS_INVALID_ARGUMENT = 4,
  TRASDIM_STATUS_OUT_OF_RANGE = 5,
  TRASDIM_STATUS_PANIC = 6,
} TrasdimStatus;

typedef enum TrasdimVerdict {
  TRASDIM_VERDICT_SAT = 0,
  TRASDIM_VERDICT_UNSAT = 1,
  TRASDIM_VERDICT_UNKNOWN = 2,
} TrasdimVerdict;

// Result of one decision run.
typedef struct TrasdimCertificate TrasdimCertificate;

// A finite window of a lattice or tower space.
typedef struct TrasdimWindow TrasdimWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *trasdim_version(void);

// Copy of the last error message on this thread, or null if none.
char *trasdim_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void trasdim_string_free(char *s);

// Parses a window from JSON: a spec such as
// `{"family":"zn","dims":2,"side":3}` or an explicit point list.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum TrasdimStatus trasdim_window_from_json(const char *json, struct TrasdimWindow **out);

// # Safety
// `window` must be null or a handle from [`trasdim_window_from_json`].
void trasdim_window_free(struct TrasdimWindow *window);

// # Safety
// `window` must be a live handle; `out` must be writable.
enum TrasdimStatus trasdim_window_len(const struct TrasdimWindow *window, size_t *out);

// Distance between points `i` and `j` in window order.
//
// # Safety
// `window` must be a live handle; `out` must be writable.
enum TrasdimStatus trasdim_window_distance(const struct TrasdimWindow *window,
                                           size_t i,
                                           size_t j,
                                           uint64_t *out);

// Decides whether `window` has a cover by `n_radii` families, family `i`
// being `radii[i]`-disjoint, with every block of diameter `≤ diameter`.
//
// # Safety
// `window` must be a live handle, `radii` must point to `n_radii` values and
// `out` must be writable.
enum TrasdimStatus trasdim_decide(const struct TrasdimWindow *window,
                                  const uint64_t *radii,
                                  size_t n_radii,
                                  uint64_t diameter,
                                  uint64_t node_budget,
                                  bool fast,
                                  struct TrasdimCertificate **out);

// # Safety
// `cert` must be null or a handle from [`trasdim_decide`].
void trasdim_certificate_free(struct TrasdimCertificate *cert);

// # Safety
// `cert` must be a live handle; `out` must be writable.
enum TrasdimStatus trasdim_certificate_verdict(const struct TrasdimCertificate *cert,
                                               enum TrasdimVerdict *out);

// Search nodes explored.
//
// # Safety
// `cert` must be a live handle; `out` must be writable.
enum TrasdimStatus trasdim_certificate_nodes(const struct TrasdimCertificate *cert, uint64_t *out);

// The certificate document, including the witness cover when SAT.
//
// # Safety
// `cert` must be a live handle; `out` must be writable. Free the result
// with [`trasdim_string_free`].
enum TrasdimStatus trasdim_certificate_to_json(const struct TrasdimCertificate *cert, char **out);

// Checks a cover document against `window` and `diameter`.
//
// # Safety
// `window` must be a live handle, `cover_json` a NUL-terminated string and
// `accepted` writable.
enum TrasdimStatus trasdim_validate_cover_json(const struct TrasdimWindow *window,
                                               const char *cover_json,
                                               uint64_t diameter,
                                               bool *accepted);

// Rank of an explicit set system given as
// `{"universe":[..],"members":[[..],..]}`, written as ordinal text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable. Free the
// result with [`trasdim_string_free`].
enum TrasdimStatus trasdim_set_system_ord(const char *json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRASDIM_H */
