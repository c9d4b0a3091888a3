#ifndef GREEDYLAB_H
#define GREEDYLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum {
  GL_STATUS_OK = 0,
  GL_STATUS_NULL_ARGUMENT = 1,
  GL_STATUS_INVALID_ARGUMENT = 2,
  GL_STATUS_OUT_OF_RANGE = 3,
  GL_STATUS_TOO_LARGE = 4,
  GL_STATUS_INTERNAL = 5,
} GlStatus;

// Initial tree for the tree algorithms.
typedef enum {
  // Greedy arrangement of all keys for the whole sequence.
  GL_INITIAL_TREE_GREEDY = 0,
  GL_INITIAL_TREE_BALANCED = 1,
  GL_INITIAL_TREE_CHAIN_LEFT = 2,
  GL_INITIAL_TREE_CHAIN_RIGHT = 3,
  // Random insertion order from the seed argument.
  GL_INITIAL_TREE_RANDOM = 4,
} GlInitialTree;

// Potential audit of a geometric greedy run.
typedef struct GlAudit GlAudit;

// Per-search costs of one run.
typedef struct GlRun GlRun;

// A search sequence over `1..=n`.
typedef struct GlSequence GlSequence;

// One audited search.
typedef struct {
  uint32_t searched;
  uint64_t cost;
  int64_t phi_before;
  int64_t phi_after;
  int64_t amortized;
  int64_t bound;
  uint32_t stubborn_left;
  uint32_t stubborn_right;
} GlAuditRow;

// Outcome of the sequential-access check.
typedef struct {
  uint64_t total;
  uint64_t bound;
  uint32_t spine_violations;
  uint32_t deep_access_violations;
  bool holds;
} GlSequentialReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Length in bytes of the last error message on this thread, excluding the
// terminating NUL.
size_t gl_last_error_length(void);

// Copies the last error message into `buf` (NUL-terminated, truncated to
// `len - 1` bytes). Returns the number of bytes written without the NUL.
//
// # Safety
// `buf` must be null or valid for `len` writes.
size_t gl_last_error_message(char *buf, size_t len);

// Creates a sequence of `m` searches over `1..=n`.
//
// # Safety
// `keys` must be valid for `m` reads (may be null when `m == 0`); `out`
// must be valid for one write.
GlStatus gl_sequence_new(size_t n, const uint32_t *keys, size_t m, GlSequence **out);

// # Safety
// `seq` must be null or a handle from [`gl_sequence_new`] not yet freed.
void gl_sequence_free(GlSequence *seq);

// Universe size; 0 for a null handle.
//
// # Safety
// `seq` must be null or a live handle.
size_t gl_sequence_n(const GlSequence *seq);

// Number of searches; 0 for a null handle.
//
// # Safety
// `seq` must be null or a live handle.
size_t gl_sequence_m(const GlSequence *seq);

// Runs the geometric greedy algorithm.
//
// # Safety
// `seq` must be a live handle and `out` valid for one write.
GlStatus gl_run_greedyass(const GlSequence *seq, GlRun **out);

// Runs the offline greedy tree algorithm from the chosen initial tree.
// `seed` is read only for [`GlInitialTree::Random`].
//
// # Safety
// `seq` must be a live handle and `out` valid for one write.
GlStatus gl_run_greedyfuture(const GlSequence *seq, GlInitialTree t0, uint64_t seed, GlRun **out);

// Runs splaying from the chosen initial tree.
//
// # Safety
// `seq` must be a live handle and `out` valid for one write.
GlStatus gl_run_splay(const GlSequence *seq, GlInitialTree t0, uint64_t seed, GlRun **out);

// # Safety
// `run` must be null or a live handle.
void gl_run_free(GlRun *run);

// Total cost; 0 for a null handle.
//
// # Safety
// `run` must be null or a live handle.
uint64_t gl_run_total(const GlRun *run);

// Number of searches; 0 for a null handle.
//
// # Safety
// `run` must be null or a live handle.
size_t gl_run_len(const GlRun *run);

// Cost of search `i` (1-based).
//
// # Safety
// `run` must be a live handle and `out` valid for one write.
GlStatus gl_run_cost(const GlRun *run, size_t i, uint64_t *out);

// Audits the geometric greedy run. Weights are `num[k] / den[k]` for key
// `k + 1`; pass null for both to use unit weights.
//
// # Safety
// `seq` must be a live handle; `num` and `den` must be null or valid for
// `n` reads; `out` must be valid for one write.
GlStatus gl_audit_new(const GlSequence *seq, const int64_t *num, const int64_t *den, GlAudit **out);

// # Safety
// `audit` must be null or a live handle.
void gl_audit_free(GlAudit *audit);

// Number of audited searches; 0 for a null handle.
//
// # Safety
// `audit` must be null or a live handle.
size_t gl_audit_len(const GlAudit *audit);

// Row of search `i` (1-based).
//
// # Safety
// `audit` must be a live handle and `out` valid for one write.
GlStatus gl_audit_row(const GlAudit *audit, size_t i, GlAuditRow *out);

// Every search within its bound and the amortized sum exact.
//
// # Safety
// `audit` must be null or a live handle.
bool gl_audit_holds(const GlAudit *audit);

// Runs the tree algorithm on `1, 2, ..., n` with the invariant checks.
//
// # Safety
// `out` must be valid for one write.
GlStatus gl_check_sequential(size_t n, GlInitialTree t0, uint64_t seed, GlSequentialReport *out);

// Whether the `count` points `(xs[k], ys[k])` on the `n x m` grid are
// arborally satisfied.
//
// # Safety
// `xs` and `ys` must be valid for `count` reads; `out` for one write.
GlStatus gl_is_satisfied(size_t n,
                         size_t m,
                         const uint32_t *xs,
                         const uint32_t *ys,
                         size_t count,
                         bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREEDYLAB_H */
