#ifndef WORDEQ_H
#define WORDEQ_H

/* This file is generated by cbindgen from wordeq-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum WeqStatus {
  WEQ_OK = 0,
  WEQ_NULL_POINTER = 1,
  WEQ_INVALID_UTF8 = 2,
  WEQ_PARSE_ERROR = 3,
  WEQ_BUDGET_EXCEEDED = 4,
  WEQ_COVERAGE_INCOMPLETE = 5,
  WEQ_INVALID_INPUT = 6,
} WeqStatus;

// Opaque handle to a band system.
typedef struct WeqBandSystem WeqBandSystem;

// Opaque handle to an enumerated solution set.
typedef struct WeqSolutions WeqSolutions;

// Opaque handle to a parsed equation system.
typedef struct WeqSystem WeqSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the last error message recorded on this thread, or NULL. The
// pointer is owned by the library and valid until the next failing call.
const char *weq_last_error_message(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned through an out-parameter of
// this library and not yet freed.
void weq_string_free(char *s);

// Parses an equation file (the same text format the CLI reads).
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be a valid
// pointer to a handle slot.
enum WeqStatus weq_system_parse(const char *text, struct WeqSystem **out);

// # Safety
// `sys` must come from [`weq_system_parse`] and not be freed twice.
void weq_system_free(struct WeqSystem *sys);

// Number of equations in the system.
//
// # Safety
// `sys` must be a live handle.
size_t weq_system_equation_count(const struct WeqSystem *sys);

// Enumerates all solutions at bounded length with both strategies and
// cross-checks them; disagreement is reported as invalid input.
//
// # Safety
// `sys` must be a live handle; `out` a valid slot.
enum WeqStatus weq_solve(const struct WeqSystem *sys,
                         uint32_t max_len,
                         uint64_t max_solutions,
                         uint64_t max_nodes,
                         struct WeqSolutions **out);

// # Safety
// `sols` must come from [`weq_solve`] and not be freed twice.
void weq_solutions_free(struct WeqSolutions *sols);

// Number of solutions held by the handle.
//
// # Safety
// `sols` must be a live handle.
size_t weq_solutions_len(const struct WeqSolutions *sols);

// Whether the enumeration finished without hitting a cap.
//
// # Safety
// `sols` must be a live handle.
bool weq_solutions_complete(const struct WeqSolutions *sols);

// Writes the whole solution set as a JSON document.
//
// # Safety
// `sols` must be a live handle; `out` a valid slot; free the string with
// [`weq_string_free`].
enum WeqStatus weq_solutions_to_json(const struct WeqSolutions *sols, char **out);

// Parses a band-system JSON document.
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` a valid slot.
enum WeqStatus weq_band_system_parse(const char *json, struct WeqBandSystem **out);

// # Safety
// `bs` must come from [`weq_band_system_parse`] and not be freed twice.
void weq_band_system_free(struct WeqBandSystem *bs);

// Euler characteristic of the associated graph.
//
// # Safety
// `bs` must be a live handle.
int64_t weq_band_system_chi(const struct WeqBandSystem *bs);

// Runs the machine for at most `steps` moves and writes the trace as one
// JSON record per line. The handle itself is not modified.
//
// # Safety
// `bs` must be a live handle; `out` a valid slot; free the string with
// [`weq_string_free`].
enum WeqStatus weq_band_run_trace(const struct WeqBandSystem *bs, uint32_t steps, char **out);

// Checks a diagram JSON document against the oracle and writes the report
// as JSON. Full coverage returns `WeqOk`; a nonempty uncovered set returns
// `WeqCoverageIncomplete` with the report still written.
//
// # Safety
// `mrd_json` must be a valid NUL-terminated string; `out` a valid slot;
// free the string with [`weq_string_free`].
enum WeqStatus weq_diagram_check(const char *mrd_json,
                                 uint32_t max_len,
                                 uint32_t twist_depth,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WORDEQ_H */
