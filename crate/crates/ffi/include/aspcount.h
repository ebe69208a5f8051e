#ifndef ASPCOUNT_H
#define ASPCOUNT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AspcStatus {
  ASPC_STATUS_OK = 0,
  ASPC_STATUS_PARSE_ERROR = 1,
  ASPC_STATUS_RESOURCE_LIMIT = 2,
  ASPC_STATUS_NULL_POINTER = 3,
  ASPC_STATUS_INVALID_UTF8 = 4,
  ASPC_STATUS_PANIC = 5,
} AspcStatus;

// A parsed ground program.
typedef struct AspcProgram AspcProgram;

// Outcome of a successful count.
typedef struct AspcResult AspcResult;

// Counting options. Obtain defaults from [`aspc_options_default`].
typedef struct AspcOptions {
  bool use_cache;
  // Component cache limit in MiB.
  uint64_t cache_limit_mb;
  // Time budget in milliseconds; 0 means unlimited.
  uint64_t budget_ms;
  bool has_seed;
  uint64_t seed;
} AspcOptions;

typedef struct AspcStats {
  uint64_t decisions;
  uint64_t propagations;
  double bcp_seconds;
  uint64_t cache_lookups;
  uint64_t cache_hits;
  uint64_t cache_entries;
  double wall_seconds;
} AspcStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into this library on the same thread.
const char *aspc_last_error(void);

// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum AspcStatus aspc_program_parse(const char *text, struct AspcProgram **out);

// # Safety
// `program` must come from [`aspc_program_parse`] and not be used afterwards.
void aspc_program_free(struct AspcProgram *program);

// Number of distinct atoms, or 0 for NULL.
//
// # Safety
// `program` must be NULL or a live handle.
uintptr_t aspc_program_num_atoms(const struct AspcProgram *program);

struct AspcOptions aspc_options_default(void);

// Counts answer sets. `options` may be NULL for defaults.
//
// # Safety
// `program` must be a live handle, `options` NULL or valid, `out` valid.
enum AspcStatus aspc_count(const struct AspcProgram *program,
                           const struct AspcOptions *options,
                           struct AspcResult **out);

// Decimal count as a new string, or NULL for a NULL handle.
//
// # Safety
// `result` must be NULL or a live handle.
char *aspc_result_count(const struct AspcResult *result);

// # Safety
// `result` must be a live handle and `out` a valid pointer.
enum AspcStatus aspc_result_stats(const struct AspcResult *result, struct AspcStats *out);

// # Safety
// `result` must come from [`aspc_count`] and not be used afterwards.
void aspc_result_free(struct AspcResult *result);

// Annotated DIMACS for `F ∧ G` as a new string.
//
// # Safety
// `program` must be a live handle and `out` a valid pointer.
enum AspcStatus aspc_translate(const struct AspcProgram *program, char **out);

// # Safety
// `s` must be NULL or a string returned by this library, freed once.
void aspc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASPCOUNT_H */
