/* C interface to the misect weighted matroid intersection solver. */

#ifndef MISECT_H
#define MISECT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum MisectStatus {
  MISECT_STATUS_OK = 0,
  MISECT_STATUS_NULL_POINTER = 1,
  MISECT_STATUS_INVALID_UTF8 = 2,
  // Malformed instance JSON; details via `misect_last_error_message`.
  MISECT_STATUS_PARSE_ERROR = 3,
  // The solve aborted; details via `misect_last_error_message`.
  MISECT_STATUS_SOLVE_ERROR = 4,
  // The optimality certificate failed re-verification.
  MISECT_STATUS_CERTIFICATE_INVALID = 5,
  MISECT_STATUS_BUFFER_TOO_SMALL = 6,
} MisectStatus;

// An instance handle: two matroid descriptors plus weights.
typedef struct MisectInstance MisectInstance;

// A solve result handle.
typedef struct MisectSolution MisectSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses an instance from JSON. On success writes a heap-allocated handle
// to `out`; release it with `misect_instance_free`.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum MisectStatus misect_instance_parse_json(const char *json, struct MisectInstance **out);

// Ground-set size of a parsed instance.
//
// # Safety
// `inst` must be a live handle from `misect_instance_parse_json`.
uintptr_t misect_instance_ground_size(const struct MisectInstance *inst);

// Releases an instance handle. NULL is a no-op.
//
// # Safety
// `inst` must be NULL or a live handle; it is dead afterwards.
void misect_instance_free(struct MisectInstance *inst);

// Solves an instance exactly. When `certify` is true the optimality
// certificate is re-verified and `MISECT_CERTIFICATE_INVALID` reported on
// failure. On success writes a solution handle to `out`; release it with
// `misect_solution_free`.
//
// # Safety
// `inst` must be a live instance handle and `out` a valid pointer.
enum MisectStatus misect_solve(const struct MisectInstance *inst,
                               bool certify,
                               struct MisectSolution **out);

// Weight of the returned common independent set.
//
// # Safety
// `sol` must be a live solution handle.
int64_t misect_solution_weight(const struct MisectSolution *sol);

// Number of elements in the returned set.
//
// # Safety
// `sol` must be a live solution handle.
uintptr_t misect_solution_len(const struct MisectSolution *sol);

// Copies the element ids (ascending) into `buf`. Writes the copied count
// to `written` when non-NULL; fails with `MISECT_BUFFER_TOO_SMALL` if `cap`
// is insufficient.
//
// # Safety
// `sol` must be a live handle and `buf` valid for `cap` elements.
enum MisectStatus misect_solution_elements(const struct MisectSolution *sol,
                                           uint64_t *buf,
                                           uintptr_t cap,
                                           uintptr_t *written);

// Total rank queries issued by the solve (all phases).
//
// # Safety
// `sol` must be a live solution handle.
uint64_t misect_solution_queries_total(const struct MisectSolution *sol);

// Rank queries of the algorithm proper (initialization and verification
// excluded).
//
// # Safety
// `sol` must be a live solution handle.
uint64_t misect_solution_queries_algorithm(const struct MisectSolution *sol);

// Serializes the full run report as JSON into a heap string; release with
// `misect_string_free`.
//
// # Safety
// `sol` must be a live handle and `out` a valid pointer.
enum MisectStatus misect_solution_report_json(const struct MisectSolution *sol, char **out);

// Releases a solution handle. NULL is a no-op.
//
// # Safety
// `sol` must be NULL or a live handle; it is dead afterwards.
void misect_solution_free(struct MisectSolution *sol);

// Releases a string returned by this library. NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string produced by this library, not yet freed.
void misect_string_free(char *s);

// Message of the last error on this thread. The pointer stays valid until
// the next failing call on the same thread; do not free it.
const char *misect_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MISECT_H */
