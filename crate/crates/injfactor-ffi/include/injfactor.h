#ifndef INJFACTOR_H
#define INJFACTOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum InjfStatus {
  INJF_STATUS_OK = 0,
  INJF_STATUS_NULL_ARGUMENT = 1,
  INJF_STATUS_INVALID_UTF8 = 2,
  INJF_STATUS_MALFORMED = 3,
  // The cycle types violate a precondition of the factorization.
  INJF_STATUS_VALIDATION = 4,
  INJF_STATUS_NOT_EQUIVALENT = 5,
  INJF_STATUS_VERIFICATION_FAILED = 6,
  INJF_STATUS_OUT_OF_CARRIER = 7,
  INJF_STATUS_OTHER = 8,
  INJF_STATUS_PANIC = 9,
} InjfStatus;

typedef struct InjfMap InjfMap;

typedef struct InjfWitness InjfWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *injf_last_error(void);

// Builds and checks a factorization witness from three cycle-type JSON texts.
//
// # Safety
// The string arguments must be null or valid NUL-terminated strings and
// `out` must be null or writable.
enum InjfStatus injf_synthesize(const char *tf,
                                const char *tg,
                                const char *th,
                                struct InjfWitness **out);

// Rebuilds a witness from bundle JSON by replaying its plan.
//
// # Safety
// As for [`injf_synthesize`].
enum InjfStatus injf_witness_from_bundle(const char *bundle, struct InjfWitness **out);

// Writes the replayable bundle JSON of a witness.
//
// # Safety
// `w` must be null or a live witness handle; `out` must be null or writable.
enum InjfStatus injf_witness_bundle(const struct InjfWitness *w, char **out);

// Checks the witness identity and certificates on `n` points and stores the
// number of failures in `failures`.
//
// # Safety
// `w` must be null or a live witness handle; `failures` must be null or
// writable.
enum InjfStatus injf_witness_verify(const struct InjfWitness *w, uintptr_t n, uintptr_t *failures);

// Evaluates `x a f0 a⁻¹ b g0 b⁻¹` on an element in text form.
//
// # Safety
// As for [`injf_witness_bundle`]; `x` must be null or a valid string.
enum InjfStatus injf_witness_chain(const struct InjfWitness *w, const char *x, char **out);

// Exposes one of the witness maps (`"f"`, `"g"`, `"h"`, `"f0"`, `"g0"`,
// `"h0"`) as a new map handle.
//
// # Safety
// As for [`injf_witness_chain`].
enum InjfStatus injf_witness_map(const struct InjfWitness *w,
                                 const char *name,
                                 struct InjfMap **out);

// # Safety
// `w` must be null or a handle not yet freed.
void injf_witness_free(struct InjfWitness *w);

// Builds a map from its JSON description.
//
// # Safety
// As for [`injf_synthesize`].
enum InjfStatus injf_map_from_description(const char *desc, struct InjfMap **out);

// Image of an element in text form.
//
// # Safety
// `m` must be null or a live map handle; `x` null or a valid string; `out`
// null or writable.
enum InjfStatus injf_map_apply(const struct InjfMap *m, const char *x, char **out);

// Preimage of an element; `*out` is set to null when it has none.
//
// # Safety
// As for [`injf_map_apply`].
enum InjfStatus injf_map_preimage(const struct InjfMap *m, const char *y, char **out);

// First `n` carrier elements in rank order, as a JSON list of text forms.
//
// # Safety
// `m` must be null or a live map handle; `out` null or writable.
enum InjfStatus injf_map_window(const struct InjfMap *m, uintptr_t n, char **out);

// Certified cycle type of a map as JSON.
//
// # Safety
// As for [`injf_map_apply`].
enum InjfStatus injf_map_census(const struct InjfMap *m, char **out);

// # Safety
// `m` must be null or a handle not yet freed.
void injf_map_free(struct InjfMap *m);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void injf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INJFACTOR_H */
