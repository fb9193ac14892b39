/* C interface for the groupoid rapid-decay toolkit. */

#ifndef GROUPOID_RD_H
#define GROUPOID_RD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Seminorm aggregation across units.
typedef enum GrdSeminormMode {
  GrdSeminormSymmetric = 0,
  GrdSeminormSupSource = 1,
} GrdSeminormMode;

// Status code returned by every fallible entry point.
typedef enum GrdStatus {
  GrdStatusOk = 0,
  GrdStatusNullPointer = 1,
  GrdStatusInvalidUtf8 = 2,
  GrdStatusIo = 3,
  GrdStatusParse = 4,
  GrdStatusSchema = 5,
  GrdStatusValidation = 6,
  GrdStatusInvalidInput = 7,
  GrdStatusInternal = 8,
} GrdStatus;

// A 2-cocycle validated against the groupoid it was loaded for.
typedef struct GrdCocycle GrdCocycle;

// A finitely supported coefficient vector on a groupoid's arrows.
typedef struct GrdFunction GrdFunction;

// A loaded groupoid, together with the metric space it came from when
// the source was a builtin space spec (so `"metric"` lengths resolve).
typedef struct GrdGroupoid GrdGroupoid;

// A length function compatible with the groupoid it was loaded for.
typedef struct GrdLength GrdLength;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string.
const char *grd_version(void);

// Copies the message of the most recent error on this thread into
// `buf` (truncated to `cap` - 1 bytes, always NUL-terminated) and
// returns the full message length in bytes, excluding the NUL. Call
// with a null `buf` or zero `cap` to query the required length.
//
// # Safety
// `buf`, when non-null, must point to at least `cap` writable bytes.
size_t grd_last_error_message(char *buf, size_t cap);

// Loads a groupoid from a JSON file path or a `builtin:` spec (for
// example `builtin:tree:6` or `builtin:cyclic:12`).
//
// # Safety
// `spec` must be a valid NUL-terminated string; `out` must be a valid
// pointer to a handle slot.
enum GrdStatus grd_groupoid_load(const char *spec, struct GrdGroupoid **out);

// Releases a groupoid handle. Null is ignored.
//
// # Safety
// `g` must be a handle from `grd_groupoid_load` not yet freed.
void grd_groupoid_free(struct GrdGroupoid *g);

// Number of arrows, or 0 for a null handle.
//
// # Safety
// `g` must be a live handle or null.
uint64_t grd_groupoid_arrows(const struct GrdGroupoid *g);

// Number of units, or 0 for a null handle.
//
// # Safety
// `g` must be a live handle or null.
uint64_t grd_groupoid_units(const struct GrdGroupoid *g);

// Loads a length function from a JSON file path or an inline spec:
// `metric` (for groupoids that came with a metric space) or
// `word:<id>,<id>,...`.
//
// # Safety
// `g` must be a live groupoid handle; `spec` a valid NUL-terminated
// string; `out` a valid pointer to a handle slot.
enum GrdStatus grd_length_load(const struct GrdGroupoid *g,
                               const char *spec,
                               struct GrdLength **out);

// Releases a length handle. Null is ignored.
//
// # Safety
// `l` must be a handle from `grd_length_load` not yet freed.
void grd_length_free(struct GrdLength *l);

// Loads a 2-cocycle from a JSON file path or an inline spec
// (`trivial`, or `heisenberg` on the four-arrow group).
//
// # Safety
// `g` must be a live groupoid handle; `spec` a valid NUL-terminated
// string; `out` a valid pointer to a handle slot.
enum GrdStatus grd_cocycle_load(const struct GrdGroupoid *g,
                                const char *spec,
                                struct GrdCocycle **out);

// Releases a cocycle handle. Null is ignored.
//
// # Safety
// `c` must be a handle from `grd_cocycle_load` not yet freed.
void grd_cocycle_free(struct GrdCocycle *c);

// Loads a function from a JSON coefficient file.
//
// # Safety
// `g` must be a live groupoid handle; `path` a valid NUL-terminated
// string; `out` a valid pointer to a handle slot.
enum GrdStatus grd_function_load(const struct GrdGroupoid *g,
                                 const char *path,
                                 struct GrdFunction **out);

// Builds a function from `len` doubles holding interleaved real and
// imaginary parts, one pair per arrow in id order; `len` must equal
// twice the arrow count.
//
// # Safety
// `g` must be a live groupoid handle; `coeffs` must point to `len`
// readable doubles; `out` must be a valid pointer to a handle slot.
enum GrdStatus grd_function_from_coeffs(const struct GrdGroupoid *g,
                                        const double *coeffs,
                                        size_t len,
                                        struct GrdFunction **out);

// Releases a function handle. Null is ignored.
//
// # Safety
// `f` must be a handle from a function constructor not yet freed.
void grd_function_free(struct GrdFunction *f);

// Reduced (fiberwise spectral) norm of `f` twisted by `sigma`.
//
// # Safety
// All handles must be live and belong to the same groupoid; `out`
// must be a valid pointer to a double.
enum GrdStatus grd_reduced_norm(const struct GrdGroupoid *g,
                                const struct GrdFunction *f,
                                const struct GrdCocycle *sigma,
                                double *out);

// Length-weighted seminorm of `f` at exponent `t`.
//
// # Safety
// All handles must be live and belong to the same groupoid; `out`
// must be a valid pointer to a double.
enum GrdStatus grd_weighted_seminorm(const struct GrdGroupoid *g,
                                     const struct GrdFunction *f,
                                     const struct GrdLength *l,
                                     double t,
                                     enum GrdSeminormMode mode,
                                     double *out);

// Seminorm concentrated at one unit's fiber.
//
// # Safety
// All handles must be live and belong to the same groupoid; `out`
// must be a valid pointer to a double.
enum GrdStatus grd_weighted_seminorm_at_unit(const struct GrdGroupoid *g,
                                             const struct GrdFunction *f,
                                             const struct GrdLength *l,
                                             double t,
                                             uint32_t unit,
                                             double *out);

// Rapid-decay ratio `reduced_norm / weighted_seminorm` at exponent
// `t`; fails on the zero function.
//
// # Safety
// All handles must be live and belong to the same groupoid; `out`
// must be a valid pointer to a double.
enum GrdStatus grd_rd_ratio(const struct GrdGroupoid *g,
                            const struct GrdFunction *f,
                            const struct GrdCocycle *sigma,
                            const struct GrdLength *l,
                            double t,
                            double *out);

// Closed-form certified lower bound on the RD ratio of a ball witness
// with `fiber_size` arrows at the given radius and exponent.
double grd_witness_ratio_bound(uint64_t fiber_size, double radius, double t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROUPOID_RD_H */
