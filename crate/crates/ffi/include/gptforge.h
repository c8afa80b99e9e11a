#ifndef GPTFORGE_H
#define GPTFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call. Verdict-returning calls report the verdict through an
// out-parameter and return `GF_OK`.
typedef enum GfStatus {
  GF_OK = 0,
  // A null pointer or an invalid index was passed.
  GF_INVALID_ARGUMENT = 1,
  // Text could not be parsed as a recipe or theory file.
  GF_PARSE_ERROR = 2,
  // The request is well formed but not meaningful for this system.
  GF_DOMAIN_ERROR = 3,
  // An internal panic was caught at the boundary.
  GF_PANIC = 4,
} GfStatus;

// Opaque handle to a theory.
typedef struct GfSystem GfSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *gf_version(void);

// Message for the last failed call on this thread, or null. Valid until
// the next call on the same thread.
const char *gf_last_error(void);

// Build a system from a recipe such as `"sqbit x bit"` or `"rtrit^2"`.
//
// # Safety
// `recipe` must be a valid nul-terminated string and `out` writable.
enum GfStatus gf_system_from_recipe(const char *recipe, struct GfSystem **out);

// Build a system from theory-file text.
//
// # Safety
// `json` must be a valid nul-terminated string and `out` writable.
enum GfStatus gf_system_from_json(const char *json, struct GfSystem **out);

// Release a handle. Null is ignored.
//
// # Safety
// `sys` must come from a `gf_system_*` constructor and not be used again.
void gf_system_free(struct GfSystem *sys);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used again.
void gf_string_free(char *s);

// Dimension of the state space; 0 for a null handle.
//
// # Safety
// `sys` must be null or a live handle.
size_t gf_system_dim(const struct GfSystem *sys);

// Number of pure-state generators; 0 for a null handle.
//
// # Safety
// `sys` must be null or a live handle.
size_t gf_system_state_count(const struct GfSystem *sys);

// Canonical theory-file text for the system.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GfStatus gf_system_to_json(const struct GfSystem *sys, char **out);

// All defining invariants hold.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GfStatus gf_validate(const struct GfSystem *sys, bool *out);

// The effect cone is the full dual of the state cone.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GfStatus gf_is_unrestricted(const struct GfSystem *sys, bool *out);

// All pure states are jointly distinguishable.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GfStatus gf_is_classical_theory(const struct GfSystem *sys, bool *out);

// Some pair of pure states is distinguishable.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GfStatus gf_exists_distinguishable_pair(const struct GfSystem *sys, bool *out);

// Whether the listed pure states (at least two) are distinguishable. When
// they are and `measurement_json` is not null, it receives the effects as a
// JSON array of rational-string vectors; otherwise it is set to null.
//
// # Safety
// `sys` must be a live handle, `states` must point to `len` indices, `out`
// must be writable and `measurement_json` null or writable.
enum GfStatus gf_distinguish(const struct GfSystem *sys,
                             const size_t *states,
                             size_t len,
                             bool *out,
                             char **measurement_json);

// The no-restriction completion as a new handle.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GfStatus gf_complete(const struct GfSystem *sys, struct GfSystem **out);

// Minimal tensor product `a (x) b` as a new handle.
//
// # Safety
// `a` and `b` must be live handles and `out` writable.
enum GfStatus gf_compose(const struct GfSystem *a, const struct GfSystem *b, struct GfSystem **out);

// The decoherence matrix of a maximal classical set of pure states, as a
// JSON array of rows. Returns `GF_DOMAIN_ERROR` when the states are not a
// maximal classical set.
//
// # Safety
// `sys` must be a live handle, `states` must point to `len` indices and
// `out` must be writable.
enum GfStatus gf_mid(const struct GfSystem *sys, const size_t *states, size_t len, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPTFORGE_H */
