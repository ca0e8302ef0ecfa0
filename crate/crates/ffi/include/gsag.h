#ifndef GSAG_H
#define GSAG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  GSAG_STATUS_OK = 0,
  GSAG_STATUS_NULL_POINTER = 1,
  GSAG_STATUS_INVALID_PARAMS = 2,
  GSAG_STATUS_INTEGRITY = 3,
  GSAG_STATUS_DECLINED = 4,
  GSAG_STATUS_BUFFER_SIZE = 5,
  GSAG_STATUS_IO = 6,
  GSAG_STATUS_NO_DECODER = 7,
  GSAG_STATUS_INTERNAL = 8,
} GsagStatus;

/**
 * Opaque handle.
 */
typedef struct GsagCode GsagCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * A static, NUL-terminated description of `status`.
 */
const char *gsag_status_message(GsagStatus status);

/**
 * Builds the code with parameters (q, n, k, K) and its encoding tables.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
GsagStatus gsag_code_new(uint64_t q, uint64_t n, uint64_t k, uint64_t dim, GsagCode **out);

/**
 * Reads a table file written by `gsag_code_save` or the command-line tool.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string; `out` as for `gsag_code_new`.
 */
GsagStatus gsag_code_load(const char *path, GsagCode **out);

/**
 * # Safety
 * `code` must be a live handle; `path` a NUL-terminated UTF-8 string.
 */
GsagStatus gsag_code_save(const GsagCode *code, const char *path);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `code` must be null or a handle not yet freed.
 */
void gsag_code_free(GsagCode *code);

/**
 * Block length N, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
uint64_t gsag_code_length(const GsagCode *code);

/**
 * Dimension K, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
uint64_t gsag_code_dimension(const GsagCode *code);

/**
 * Encodes K symbols of `msg` into N symbols of `out`.
 *
 * # Safety
 * `msg` must hold `msg_len` readable symbols and `out` `out_len` writable ones.
 */
GsagStatus gsag_encode(const GsagCode *code,
                       const uint16_t *msg,
                       size_t msg_len,
                       uint16_t *out,
                       size_t out_len);

/**
 * Prepares unique decoding. `degree` = 0 selects the guaranteed lifting
 * degree degG + K; a smaller positive value is the optimistic mode.
 *
 * # Safety
 * `code` must be a live handle not used concurrently.
 */
GsagStatus gsag_code_prepare_decoder(GsagCode *code, size_t degree, uint64_t seed);

/**
 * Unique decoding of N received symbols. On success writes K symbols to
 * `msg` and the agreement count to `agreement` (which may be null).
 *
 * # Safety
 * Buffers as for `gsag_encode`; `agreement` null or writable.
 */
GsagStatus gsag_decode(const GsagCode *code,
                       const uint16_t *received,
                       size_t len,
                       uint64_t seed,
                       uint16_t *msg,
                       size_t msg_len,
                       size_t *agreement);

/**
 * Changes exactly `errors` of the `len` symbols of `word` over F_{q²},
 * writing the result to `out` (which may equal `word`).
 *
 * # Safety
 * `word` readable and `out` writable for `len` symbols.
 */
GsagStatus gsag_corrupt(uint64_t q,
                        const uint16_t *word,
                        size_t len,
                        size_t errors,
                        uint64_t seed,
                        uint16_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSAG_H */
