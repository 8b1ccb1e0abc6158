#ifndef TRACELAB_H
#define TRACELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_ARGUMENT = 2,
  TL_STATUS_PRECONDITION = 3,
  TL_STATUS_UNSUPPORTED = 4,
  TL_STATUS_LIMIT_EXCEEDED = 5,
  TL_STATUS_DIVISION_BY_ZERO = 6,
  TL_STATUS_PARSE = 7,
  TL_STATUS_INTERNAL = 8,
} TlStatus;

typedef enum TlOp {
  TL_OP_ADD = 0,
  TL_OP_SUB = 1,
  TL_OP_MUL = 2,
  TL_OP_DIV = 3,
} TlOp;

/**
 * A finite field `F_{p^e}`.
 */
typedef struct TlField TlField;

/**
 * A tabulated trace function with values in a finite residue field.
 */
typedef struct TlTrace TlTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *tl_last_error(void);

/**
 * Creates `F_{p^e}` with its canonical modulus.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TlStatus tl_field_new(uint64_t p, uint32_t e, struct TlField **out);

/**
 * # Safety
 * `field` must come from [`tl_field_new`] and not be used afterwards. Null is ignored.
 */
void tl_field_free(struct TlField *field);

/**
 * `p^e`, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
uint64_t tl_field_order(const struct TlField *field);

/**
 * Canonical text form `p^e:modulus` written into a new string; release it
 * with [`tl_string_free`].
 *
 * # Safety
 * `field` must be a live handle and `out` a valid pointer.
 */
enum TlStatus tl_field_describe(const struct TlField *field, char **out);

/**
 * `out = a op b` on element indices.
 *
 * # Safety
 * `field` must be a live handle and `out` a valid pointer.
 */
enum TlStatus tl_field_op(const struct TlField *field,
                          enum TlOp op,
                          uint64_t a,
                          uint64_t b,
                          uint64_t *out);

/**
 * Builds a trace function from a JSON object with the experiment parameter
 * names (`p`, `e`, `ell`, `kind`, `order`, `n`, `f`, `normalized`, ...).
 *
 * # Safety
 * `config_json` must be a nul-terminated string and `out` a valid pointer.
 */
enum TlStatus tl_trace_new(const char *config_json, struct TlTrace **out);

/**
 * # Safety
 * `trace` must come from [`tl_trace_new`] and not be used afterwards. Null is ignored.
 */
void tl_trace_free(struct TlTrace *trace);

/**
 * Orders of the domain and residue fields.
 *
 * # Safety
 * `trace` must be a live handle; outputs must be valid pointers.
 */
enum TlStatus tl_trace_orders(const struct TlTrace *trace, uint64_t *domain, uint64_t *residue);

/**
 * `t(x)` as a residue-field index; `singular` is set to 1 when `x` lies in
 * the singular set, where the value is 0 by convention.
 *
 * # Safety
 * `trace` must be a live handle; outputs must be valid pointers.
 */
enum TlStatus tl_trace_value(const struct TlTrace *trace,
                             uint64_t x,
                             uint64_t *value,
                             uint8_t *singular);

/**
 * Runs a named experiment (`equidist-shift`, `variance`, ...) and returns
 * the report JSON in a new string; release it with [`tl_string_free`].
 * `exact_ok` is set to 1 when every exact check passed.
 *
 * # Safety
 * Strings must be nul-terminated; outputs must be valid pointers.
 */
enum TlStatus tl_run_experiment(const char *name,
                                const char *config_json,
                                char **report_json,
                                uint8_t *exact_ok);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void tl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRACELAB_H */
