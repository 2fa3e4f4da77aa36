#ifndef SKEWPOLAR_H
#define SKEWPOLAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define SP_OK 0

#define SP_CONDITION_FAILED 1

#define SP_BAD_INPUT 2

#define SP_INTERNAL 3

#define SP_ERROR 4

/**
 * Opaque handle: one configured instance and its residue epimorphism.
 */
typedef struct SpContext SpContext;

/**
 * Builds a context from a JSON instance description (the CLI config format)
 * and stores the handle in `*out`. On failure `*out` is untouched and, when
 * `err` is non-null, `*err` receives a message to free with
 * [`sp_string_free`].
 *
 * # Safety
 *
 * `config_json` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. The returned handle must be released with [`sp_context_free`].
 */
int sp_context_new(const char *config_json, struct SpContext **out, char **err);

/**
 * Releases a context handle. Null is a no-op.
 *
 * # Safety
 *
 * `ctx` must be null or a handle from [`sp_context_new`] not yet freed.
 */
void sp_context_free(struct SpContext *ctx);

/**
 * Maps a source point literal such as `(0|3,1,0,0)` to its image point and
 * stores the rendered image in `*out`.
 *
 * # Safety
 *
 * `ctx` must be a live handle; `literal` a valid NUL-terminated string;
 * `out` a valid pointer. Free `*out` (and `*err`) with [`sp_string_free`].
 */
int sp_map_point(const struct SpContext *ctx, const char *literal, char **out, char **err);

/**
 * Lifts a target point literal through the canonical section and stores the
 * rendered source point in `*out`.
 *
 * # Safety
 *
 * Same contract as [`sp_map_point`].
 */
int sp_lift_point(const struct SpContext *ctx, const char *literal, char **out, char **err);

/**
 * Runs the full check suite on the context's instance and stores the report
 * in `*out` as newline-delimited JSON, one record per check. `samples`
 * overrides the configured sample count when nonzero. Returns `0` when
 * every verdict matched its expectation and `1` when any diverged; other
 * codes signal that the suite could not run.
 *
 * # Safety
 *
 * `ctx` must be a live handle; `out` a valid pointer. Free `*out` (and
 * `*err`) with [`sp_string_free`].
 */
int sp_verify(const struct SpContext *ctx, uintptr_t samples, char **out, char **err);

/**
 * Releases a string produced by this library. Null is a no-op.
 *
 * # Safety
 *
 * `s` must be null or a string returned through an `out`/`err` slot of this
 * library, not yet freed.
 */
void sp_string_free(char *s);

/**
 * Library version as a static string; do not free.
 */
const char *sp_version(void);

#endif  /* SKEWPOLAR_H */
