#ifndef SQD_H
#define SQD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqdStatus {
  SQD_STATUS_OK = 0,
  SQD_STATUS_NULL_POINTER = 1,
  SQD_STATUS_INVALID_UTF8 = 2,
  SQD_STATUS_INVALID_INPUT = 3,
  SQD_STATUS_COMPUTATION_FAILED = 4,
  SQD_STATUS_PANIC = 5,
} SqdStatus;

typedef enum SqdVerdict {
  SQD_VERDICT_VIRTUALLY_NILPOTENT_SQD = 0,
  SQD_VERDICT_BEREND_SQD = 1,
  SQD_VERDICT_NOT_SQD = 2,
  SQD_VERDICT_INCONCLUSIVE = 3,
} SqdVerdict;

// Classification report.
typedef struct SqdReport SqdReport;

// Validated action specification.
typedef struct SqdSpec SqdSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses and validates a JSON spec `{"d", "n", "generators"}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SqdStatus sqd_spec_from_json(const char *json, struct SqdSpec **out);

// Lattice rank `d` and acting rank `n`.
//
// # Safety
// `spec` must come from [`sqd_spec_from_json`]; outputs must be writable.
enum SqdStatus sqd_spec_dims(const struct SqdSpec *spec, size_t *d, size_t *n);

// # Safety
// `spec` must come from [`sqd_spec_from_json`] or be null.
void sqd_spec_free(struct SqdSpec *spec);

// Classifies with default bounds; `witness` attaches a non-SQD witness
// when the verdict is `not_sqd`.
//
// # Safety
// `spec` must be a live handle; `out` must be writable.
enum SqdStatus sqd_classify(const struct SqdSpec *spec, bool witness, struct SqdReport **out);

// # Safety
// `report` must be a live handle; `out` must be writable.
enum SqdStatus sqd_report_verdict(const struct SqdReport *report, enum SqdVerdict *out);

// Pretty JSON of the report; release with [`sqd_string_free`]. Null on
// failure.
//
// # Safety
// `report` must be a live handle or null.
char *sqd_report_to_json(const struct SqdReport *report);

// # Safety
// `report` must come from [`sqd_classify`] or be null.
void sqd_report_free(struct SqdReport *report);

// Builds the two-unit spec for a totally real cubic given as ascending
// comma-separated coefficients; writes the full verification report as
// JSON to `out_json` (release with [`sqd_string_free`]).
//
// # Safety
// `poly` must be a NUL-terminated string; `out_json` must be writable.
enum SqdStatus sqd_construct_example(const char *poly, int64_t unit_bound, char **out_json);

// # Safety
// `s` must come from this library or be null.
void sqd_string_free(char *s);

// Message of the last failure on this thread, or null. Valid until the
// next library call on the same thread.
const char *sqd_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQD_H */
