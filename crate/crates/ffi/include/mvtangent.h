#ifndef MVTANGENT_H
#define MVTANGENT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MvtStatus {
  MVT_STATUS_OK = 0,
  // The computation succeeded and the verdict is negative.
  MVT_STATUS_NEGATIVE_VERDICT = 1,
  // Malformed JSON or data that violates a schema invariant.
  MVT_STATUS_INVALID_INPUT = 2,
  // Well-formed input that fails an operation's precondition.
  MVT_STATUS_PRECONDITION = 3,
  MVT_STATUS_NULL_POINTER = 4,
  // Resource exhaustion, internal inconsistency or a caught panic.
  MVT_STATUS_INTERNAL = 5,
} MvtStatus;

typedef struct MvtCertificate MvtCertificate;

typedef struct MvtClosedSet MvtClosedSet;

typedef struct MvtComplex MvtComplex;

typedef struct MvtWitness MvtWitness;

typedef struct MvtZMap MvtZMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *mvt_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library.
void mvt_string_free(char *s);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MvtStatus mvt_complex_from_json(const char *json, struct MvtComplex **out);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum MvtStatus mvt_complex_to_json(const struct MvtComplex *h, char **out);

// `MVT_STATUS_OK` when every cell is regular, `MVT_STATUS_NEGATIVE_VERDICT`
// otherwise.
//
// # Safety
// `h` must be a live handle.
enum MvtStatus mvt_complex_is_regular(const struct MvtComplex *h);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum MvtStatus mvt_complex_regularize(const struct MvtComplex *h, struct MvtComplex **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MvtStatus mvt_zmap_from_json(const char *json, struct MvtZMap **out);

// Evaluate at a point given as a JSON array of rational strings; the value
// is written in the same form.
//
// # Safety
// `h` must be a live handle, `point_json` a NUL-terminated string and
// `out` writable.
enum MvtStatus mvt_zmap_eval(const struct MvtZMap *h, const char *point_json, char **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MvtStatus mvt_closed_set_from_json(const char *json, struct MvtClosedSet **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MvtStatus mvt_certificate_from_json(const char *json, struct MvtCertificate **out);

// Check the certificate against `x`. The tangency evidence uses the first
// sample of `x` converging to the certificate's point. `report` may be NULL.
//
// # Safety
// Handles must be live; `report` must be NULL or writable.
enum MvtStatus mvt_check_outgoing(const struct MvtCertificate *cert,
                                  const struct MvtClosedSet *x,
                                  double tol,
                                  char **report);

// # Safety
// `cert` must be a live handle; `out` must be writable.
enum MvtStatus mvt_witness_build(const struct MvtCertificate *cert,
                                 size_t n,
                                 struct MvtWitness **out);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum MvtStatus mvt_witness_to_json(const struct MvtWitness *h, char **out);

// `X ∩ Zf = X ∩ Zg`. `report` may be NULL.
//
// # Safety
// Handles must be live; `report` must be NULL or writable.
enum MvtStatus mvt_witness_verify(const struct MvtWitness *w,
                                  const struct MvtClosedSet *x,
                                  char **report);

// `MVT_STATUS_OK` when `f ≤ m·g` fails on `x` for every `m ≤ m_max`.
// `report` may be NULL.
//
// # Safety
// Handles must be live; `report` must be NULL or writable.
enum MvtStatus mvt_witness_refute(const struct MvtWitness *w,
                                  const struct MvtClosedSet *x,
                                  uint64_t m_max,
                                  char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MVTANGENT_H */
