#ifndef FFPERIODS_H
#define FFPERIODS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FfpStatus {
  FFP_STATUS_OK = 0,
  FFP_STATUS_VERIFICATION_FAILED = 1,
  FFP_STATUS_INVALID_INPUT = 2,
  FFP_STATUS_PRECISION_INSUFFICIENT = 3,
  FFP_STATUS_NULL_POINTER = 4,
  FFP_STATUS_PANIC = 5,
} FfpStatus;

// A curve over a finite field.
typedef struct FfpCurve FfpCurve;

// A finished verification report.
typedef struct FfpReport FfpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The projective line over `F_q`.
//
// # Safety
// `out` must be valid for a pointer write.
enum FfpStatus ffp_curve_new_p1(uint64_t q, struct FfpCurve **out);

// `y^2 + a1 t y + a3 y = t^3 + a2 t^2 + a4 t + a6` over `F_q`, with
// `a = {a1, a2, a3, a4, a6}` reduced into the field.
//
// # Safety
// `a` must point to five readable integers and `out` must be valid for a
// pointer write.
enum FfpStatus ffp_curve_new_elliptic(uint64_t q, const int64_t *a, struct FfpCurve **out);

// # Safety
// `curve` must be null or a handle from this library not yet freed.
void ffp_curve_free(struct FfpCurve *curve);

// Number of points over `F_{q^d}`, including the point at infinity.
//
// # Safety
// `curve` must be a live handle and `out` valid for a write.
enum FfpStatus ffp_curve_count_points(const struct FfpCurve *curve, uint32_t d, uint64_t *out);

// `zeta'(0)/zeta(0)` of the ring regular away from infinity, as the
// rational coefficient `num/den` of `log q`.
//
// # Safety
// `curve` must be a live handle; `num` and `den` valid for writes.
enum FfpStatus ffp_zeta_logderiv(const struct FfpCurve *curve, int64_t *num, int64_t *den);

// Sum of `d_v v(f)` over all places for the element written in `elem`
// (e.g. `"(t^2+1)/t"` or `"y/t"`).
//
// # Safety
// `curve` must be a live handle, `elem` a NUL-terminated string and
// `total` valid for a write.
enum FfpStatus ffp_product_formula(const struct FfpCurve *curve, const char *elem, int64_t *total);

// The regularized Carlitz product formula over `F_q(t)`.
//
// # Safety
// `out` must be valid for a pointer write.
enum FfpStatus ffp_carlitz_report(uint64_t q,
                                  int64_t prec,
                                  uint32_t max_place_degree,
                                  struct FfpReport **out);

// The genus-one period ledger of an elliptic curve.
//
// # Safety
// `curve` must be a live handle and `out` valid for a pointer write.
enum FfpStatus ffp_genus1_report(const struct FfpCurve *curve,
                                 int64_t prec,
                                 uint32_t product_truncation,
                                 struct FfpReport **out);

// Total of the report's ledger as `num/den` (coefficient of `log q`).
//
// # Safety
// `report` must be a live handle; `num` and `den` valid for writes.
enum FfpStatus ffp_report_total(const struct FfpReport *report, int64_t *num, int64_t *den);

// `Ok` when the ledger total vanishes, `VerificationFailed` otherwise.
//
// # Safety
// `report` must be null or a live handle.
enum FfpStatus ffp_report_status(const struct FfpReport *report);

// The report as JSON; release with [`ffp_string_free`]. Null on failure.
//
// # Safety
// `report` must be null or a live handle.
char *ffp_report_to_json(const struct FfpReport *report);

// # Safety
// `report` must be null or a handle from this library not yet freed.
void ffp_report_free(struct FfpReport *report);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void ffp_string_free(char *s);

// Message for the last failed call on this thread, empty after a
// success. Valid until the next call into the library on this thread.
const char *ffp_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFPERIODS_H */
