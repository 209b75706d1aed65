#ifndef PSEUDOLEM_H
#define PSEUDOLEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define PL_OK 0

#define PL_ERR_INPUT 2

#define PL_ERR_NUMERIC 3

#define PL_ERR_INTERNAL 4

#define PL_LOCATION_INSIDE 0

#define PL_LOCATION_OUTSIDE 1

#define PL_LOCATION_NEAR_BOUNDARY 2

/**
 * Opaque sampled Jordan curve.
 */
typedef struct PlCurve PlCurve;

/**
 * Opaque parsed function of one complex variable.
 */
typedef struct PlFunction PlFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread, or null after
 * a success. The pointer stays valid until the next call on this thread;
 * do not free it.
 */
const char *pl_last_error_message(void);

/**
 * Frees a string returned by one of the `*_json` entry points.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void pl_string_free(char *s);

/**
 * Parses an expression in `z` (e.g. `"z^2 * (1 - 0.25*z) / (z - 0.25)"`)
 * into a function handle. On success writes the handle to `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid destination.
 */
int pl_function_parse(const char *text, struct PlFunction **out);

/**
 * # Safety
 * `f` must be null or an unfreed handle from [`pl_function_parse`].
 */
void pl_function_free(struct PlFunction *f);

/**
 * Evaluates f(z). Non-finite inputs mean the point at infinity, and an
 * infinite value comes back as +inf in both output slots.
 *
 * # Safety
 * `f` must be a live handle; `out_re` and `out_im` must be writable.
 */
int pl_function_eval(const struct PlFunction *f,
                     double re,
                     double im,
                     double *out_re,
                     double *out_im);

/**
 * Evaluates f'(z), with the same conventions as [`pl_function_eval`].
 *
 * # Safety
 * `f` must be a live handle; `out_re` and `out_im` must be writable.
 */
int pl_function_eval_derivative(const struct PlFunction *f,
                                double re,
                                double im,
                                double *out_re,
                                double *out_im);

/**
 * Builds a circle sampled at `samples` points.
 *
 * # Safety
 * `out` must be a valid destination.
 */
int pl_curve_circle(double center_re,
                    double center_im,
                    double radius,
                    uintptr_t samples,
                    struct PlCurve **out);

/**
 * Builds the outward offset of a simple polygon with circular-arc corners.
 * `vertices` holds `vertex_count` interleaved (re, im) pairs; `density` is
 * samples per unit of arc length.
 *
 * # Safety
 * `vertices` must point to `2 * vertex_count` doubles; `out` must be valid.
 */
int pl_curve_rounded_polygon(const double *vertices,
                             uintptr_t vertex_count,
                             double fillet_radius,
                             double density,
                             struct PlCurve **out);

/**
 * Builds a closed curve through the listed points (`point_count`
 * interleaved (re, im) pairs, first point not repeated).
 *
 * # Safety
 * `points` must point to `2 * point_count` doubles; `out` must be valid.
 */
int pl_curve_from_samples(const double *points, uintptr_t point_count, struct PlCurve **out);

/**
 * # Safety
 * `curve` must be null or an unfreed handle from a `pl_curve_*` builder.
 */
void pl_curve_free(struct PlCurve *curve);

/**
 * Winding number of the curve about (re, im). Fails with
 * `PL_ERR_NUMERIC` when the point is too close to the curve.
 *
 * # Safety
 * `curve` must be a live handle; `out_winding` must be writable.
 */
int pl_winding_number(const struct PlCurve *curve, double re, double im, int64_t *out_winding);

/**
 * Locates (re, im) relative to the curve: `PL_LOCATION_INSIDE`,
 * `PL_LOCATION_OUTSIDE`, or `PL_LOCATION_NEAR_BOUNDARY`, plus the
 * distance to the curve. Either output may be null to skip it.
 *
 * # Safety
 * `curve` must be a live handle; non-null outputs must be writable.
 */
int pl_locate_point(const struct PlCurve *curve,
                    double re,
                    double im,
                    int *out_location,
                    double *out_distance);

/**
 * N_f(w): solutions of f(z) = w strictly inside the curve, counted with
 * multiplicity, by the argument principle. Non-finite (w_re, w_im) counts
 * poles instead; a w on the image of the curve falls back to isolating
 * the solutions directly.
 *
 * # Safety
 * `f` and `s` must be live handles; `out_count` must be writable.
 */
int pl_count_preimages(const struct PlFunction *f,
                       const struct PlCurve *s,
                       double w_re,
                       double w_im,
                       uint32_t *out_count);

/**
 * Number of poles of f strictly inside the curve, with multiplicity.
 *
 * # Safety
 * `f` and `s` must be live handles; `out_count` must be writable.
 */
int pl_count_poles(const struct PlFunction *f, const struct PlCurve *s, uint32_t *out_count);

/**
 * Runs a pseudo-lemniscate classification job (same JSON schema as the
 * CLI) and writes the report JSON to `*out_report_json`. The status code
 * matches the CLI exit code; the report is produced either way and must
 * be released with [`pl_string_free`].
 *
 * # Safety
 * `job_json` must be NUL-terminated; `out_report_json` must be writable.
 */
int pl_classify_json(const char *job_json, char **out_report_json);

/**
 * Runs a non-Jordan-image test job. See [`pl_classify_json`].
 *
 * # Safety
 * `job_json` must be NUL-terminated; `out_report_json` must be writable.
 */
int pl_non_jordan_json(const char *job_json, char **out_report_json);

/**
 * Runs a preimage-curve tracing job. See [`pl_classify_json`].
 *
 * # Safety
 * `job_json` must be NUL-terminated; `out_report_json` must be writable.
 */
int pl_trace_json(const char *job_json, char **out_report_json);

/**
 * Runs a zero/pole isolation job. See [`pl_classify_json`].
 *
 * # Safety
 * `job_json` must be NUL-terminated; `out_report_json` must be writable.
 */
int pl_locate_json(const char *job_json, char **out_report_json);

/**
 * Runs a preimage-counting job. See [`pl_classify_json`].
 *
 * # Safety
 * `job_json` must be NUL-terminated; `out_report_json` must be writable.
 */
int pl_count_json(const char *job_json, char **out_report_json);

/**
 * Runs a Blaschke-ratio model fit job. See [`pl_classify_json`].
 *
 * # Safety
 * `job_json` must be NUL-terminated; `out_report_json` must be writable.
 */
int pl_blaschke_model_json(const char *job_json, char **out_report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSEUDOLEM_H */
