#ifndef ECGA_H
#define ECGA_H

/* Generated by cbindgen from the ecga-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call.
 */
typedef enum EcgaStatus {
  ECGA_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  ECGA_STATUS_NULL_POINTER = 1,
  /**
   * An argument failed validation (unknown curve, bad lengths, ...).
   */
  ECGA_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The pipeline itself reported an error (domain or I/O).
   */
  ECGA_STATUS_DOMAIN_ERROR = 3,
  /**
   * The destination buffer is too small.
   */
  ECGA_STATUS_BUFFER_TOO_SMALL = 4,
  /**
   * An internal invariant was violated.
   */
  ECGA_STATUS_INTERNAL = 5,
} EcgaStatus;

/**
 * How an optimization run terminated.
 */
typedef enum EcgaStopReason {
  ECGA_STOP_REASON_OPTIMAL = 0,
  ECGA_STOP_REASON_CAP_REACHED = 1,
} EcgaStopReason;

/**
 * Opaque sequence handle; create via `ecga_generate` or
 * `ecga_sequence_from_bytes`, destroy via `ecga_sequence_free`.
 */
typedef struct EcgaSequence EcgaSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Generates the initial (unoptimized) sequence.
 *
 * `curve` is a NUL-terminated built-in curve name ("p256" or "p521");
 * `image`/`image_len` are the row-major 8-bit pixels; `bz_seed` must hold
 * at least 32 bytes. On success `*out` owns a new handle.
 *
 * # Safety
 * All pointers must be valid for the stated lengths; `curve` must point to
 * a NUL-terminated string.
 */
enum EcgaStatus ecga_generate(const uint8_t *image,
                              uintptr_t image_len,
                              const char *curve,
                              uint16_t phi,
                              uint16_t psi,
                              uint16_t varphi,
                              const uint8_t *bz_seed,
                              uintptr_t bz_seed_len,
                              uintptr_t length,
                              struct EcgaSequence **out);

/**
 * Wraps raw bytes (one 8-bit symbol per byte) in a sequence handle.
 *
 * # Safety
 * `bytes` must be valid for `len` bytes; `out` must be a valid pointer.
 */
enum EcgaStatus ecga_sequence_from_bytes(const uint8_t *bytes,
                                         uintptr_t len,
                                         struct EcgaSequence **out);

/**
 * Hill-climbs `seq` and replaces `*out` with the optimized sequence;
 * `seq` itself is untouched. `reason` (optional) receives how the run
 * stopped.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be valid; `reason` may be null.
 */
enum EcgaStatus ecga_optimize(const struct EcgaSequence *seq,
                              uint64_t rng_seed,
                              uint64_t max_generations,
                              struct EcgaSequence **out,
                              enum EcgaStopReason *reason);

/**
 * Length of the sequence in symbols; 0 for a null handle.
 *
 * # Safety
 * `seq` must be null or a live handle.
 */
uintptr_t ecga_sequence_len(const struct EcgaSequence *seq);

/**
 * Copies the sequence into `buf` (one byte per symbol). `buf_len` must be
 * at least `ecga_sequence_len(seq)`.
 *
 * # Safety
 * `seq` must be a live handle; `buf` must be valid for `buf_len` bytes.
 */
enum EcgaStatus ecga_sequence_copy_bytes(const struct EcgaSequence *seq,
                                         uint8_t *buf,
                                         uintptr_t buf_len);

/**
 * Shannon entropy of the symbol distribution, in bits.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be a valid pointer.
 */
enum EcgaStatus ecga_sequence_entropy(const struct EcgaSequence *seq, double *out);

/**
 * Least period of the sequence.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be a valid pointer.
 */
enum EcgaStatus ecga_sequence_period(const struct EcgaSequence *seq, uintptr_t *out);

/**
 * Hurst exponent (rescaled-range estimate); needs at least 64 symbols.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be a valid pointer.
 */
enum EcgaStatus ecga_sequence_hurst(const struct EcgaSequence *seq, double *out);

/**
 * Bit-change rate between two equal-length sequences, in percent.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be a valid pointer.
 */
enum EcgaStatus ecga_nbcr(const struct EcgaSequence *a, const struct EcgaSequence *b, double *out);

/**
 * Pearson correlation between two equal-length sequences.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be a valid pointer.
 */
enum EcgaStatus ecga_pearson(const struct EcgaSequence *a,
                             const struct EcgaSequence *b,
                             double *out);

/**
 * Releases a handle. Null is a no-op; a handle must not be used after
 * being freed.
 *
 * # Safety
 * `seq` must be null or a handle returned by this library that has not
 * been freed yet.
 */
void ecga_sequence_free(struct EcgaSequence *seq);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECGA_H */
