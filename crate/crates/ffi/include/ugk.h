#ifndef UGK_H
#define UGK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum UgkStatus {
  UGK_STATUS_OK = 0,
  UGK_STATUS_NULL_POINTER = 1,
  UGK_STATUS_INVALID_UTF8 = 2,
  UGK_STATUS_PARSE = 3,
  UGK_STATUS_INVALID_PRESENTATION = 4,
  UGK_STATUS_PRECONDITION = 5,
  UGK_STATUS_WITNESS_NOT_FOUND = 6,
  UGK_STATUS_UNDEFINED = 7,
  UGK_STATUS_INTERNAL = 8,
} UgkStatus;

typedef enum UgkVerdict {
  UGK_VERDICT_HOLDS = 0,
  UGK_VERDICT_FAILS = 1,
  UGK_VERDICT_UNKNOWN = 2,
} UgkVerdict;

// An element of the topological full group.
typedef struct UgkElement UgkElement;

// A validated ultragraph presentation.
typedef struct UgkGraph UgkGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread; empty after success.
// The pointer stays valid until the next call on the same thread.
const char *ugk_last_error(void);

// # Safety
// `s` must come from this library or be null.
void ugk_string_free(char *s);

// Parses and validates a presentation written in the ultragraph DSL.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum UgkStatus ugk_graph_parse(const char *text, struct UgkGraph **out);

// # Safety
// `g` must come from [`ugk_graph_parse`] or be null.
void ugk_graph_free(struct UgkGraph *g);

// Number of minimal infinite emitters.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_graph_mie_count(const struct UgkGraph *g, size_t *out);

// Decides one of `L`, `K`, `T`, `ND`, `INF`, `W`. When `json` is not null
// it receives the report as a JSON string.
//
// # Safety
// Pointers must be valid; `json` may be null.
enum UgkStatus ugk_check(const struct UgkGraph *g,
                         const char *condition,
                         size_t bound,
                         enum UgkVerdict *verdict,
                         char **json);

// Runs a group-word script; `out` receives the query results, one per line.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_eval(const struct UgkGraph *g, const char *script, size_t bound, char **out);

// Evaluates a group word such as `[pi_hat(Z(e1; e2; mie#0)), f3(D(; mie#0))]`.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_element_parse(const struct UgkGraph *g,
                                 const char *word,
                                 size_t bound,
                                 struct UgkElement **out);

// # Safety
// `e` must come from this library or be null.
void ugk_element_free(struct UgkElement *e);

// `a ∘ b`, applying `b` first.
//
// # Safety
// Pointers must be valid and both elements must belong to `g`.
enum UgkStatus ugk_element_compose(const struct UgkGraph *g,
                                   const struct UgkElement *a,
                                   const struct UgkElement *b,
                                   struct UgkElement **out);

// # Safety
// Pointers must be valid.
enum UgkStatus ugk_element_inverse(const struct UgkElement *a, struct UgkElement **out);

// The order of `a`, or 0 when it exceeds `max`.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_element_order(const struct UgkGraph *g,
                                 const struct UgkElement *a,
                                 size_t max,
                                 size_t *out);

// Writes 1 to `out` when the elements act identically, else 0.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_element_equals(const struct UgkGraph *g,
                                  const struct UgkElement *a,
                                  const struct UgkElement *b,
                                  int32_t *out);

// Row table of the element, e.g. `Z(e1; e2; mie#0; {}) + ...` or `id`.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_element_display(const struct UgkGraph *g,
                                   const struct UgkElement *a,
                                   char **out);

// Image of a point such as `fin(e1; mie#0)` under `a`.
//
// # Safety
// Pointers must be valid.
enum UgkStatus ugk_element_apply(const struct UgkGraph *g,
                                 const struct UgkElement *a,
                                 const char *point,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UGK_H */
