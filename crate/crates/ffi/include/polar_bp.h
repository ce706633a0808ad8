#ifndef POLAR_BP_H
#define POLAR_BP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PbStatus {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_ARGUMENT = 2,
  PB_STATUS_LENGTH_MISMATCH = 3,
  PB_STATUS_DECODE_FAILED = 4,
  PB_STATUS_PANIC = 5,
} PbStatus;

/**
 * Decoder variant selector.
 */
typedef enum PbVariant {
  PB_VARIANT_BP = 0,
  PB_VARIANT_FPBP = 1,
  PB_VARIANT_PPBP = 2,
  PB_VARIANT_NABP = 3,
} PbVariant;

/**
 * A constructed polar code with its CRC.
 */
typedef struct PbCode PbCode;

/**
 * A decoder bound to one code. Each call to [`pb_decoder_decode`] draws
 * from the next stream of the seed given at creation.
 */
typedef struct PbDecoder PbDecoder;

/**
 * Decoder parameters; fill with [`pb_decoder_params_default`] and adjust.
 */
typedef struct PbDecoderParams {
  enum PbVariant variant;
  size_t max_iters;
  size_t reset_iters;
  size_t q_max;
  size_t p_range;
  size_t p_level;
  size_t d;
  size_t n_min;
  double sigma2_noise;
  size_t noise_interval;
  size_t warmup;
  /**
   * Nonzero selects the exact boxplus instead of min-sum.
   */
  uint8_t exact_boxplus;
  double llr_max;
} PbDecoderParams;

/**
 * Per-decode summary.
 */
typedef struct PbDecodeResult {
  size_t iterations_used;
  size_t permutations_used;
  uint8_t stopped_early;
  uint8_t crc_pass;
} PbDecodeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a
 * successful one. Valid until the next call on the same thread.
 */
const char *pb_last_error(void);

/**
 * Builds a code of length `n` with `k` non-frozen positions (CRC included)
 * designed at `design_ebn0_db`. `crc_len` is 0 or 24.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PbStatus pb_code_construct(size_t n,
                                size_t k,
                                size_t crc_len,
                                double design_ebn0_db,
                                struct PbCode **out);

/**
 * Releases a code. Null is ignored.
 *
 * # Safety
 * `code` must come from [`pb_code_construct`] and not be used afterwards.
 */
void pb_code_free(struct PbCode *code);

/**
 * Block length N, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t pb_code_block_len(const struct PbCode *code);

/**
 * Payload bits per frame, K minus the CRC length; 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t pb_code_payload_len(const struct PbCode *code);

/**
 * Writes the frozen mask (1 = frozen) into `mask[0..n]`.
 *
 * # Safety
 * `code` must be a live handle and `mask` valid for `mask_len` bytes.
 */
enum PbStatus pb_code_frozen_mask(const struct PbCode *code, uint8_t *mask, size_t mask_len);

/**
 * Attaches the CRC to `payload`, places it on the non-frozen positions and
 * writes the codeword to `codeword[0..n]`. Bits are bytes holding 0 or 1.
 *
 * # Safety
 * `code` must be a live handle; `payload` valid for `payload_len` bytes and
 * `codeword` for `codeword_len` bytes.
 */
enum PbStatus pb_code_encode(const struct PbCode *code,
                             const uint8_t *payload,
                             size_t payload_len,
                             uint8_t *codeword,
                             size_t codeword_len);

/**
 * Default parameters of `variant` for a code with `stages = log2 N`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum PbStatus pb_decoder_params_default(enum PbVariant variant,
                                        size_t stages,
                                        struct PbDecoderParams *out);

/**
 * Creates a decoder for `code`. The code handle is copied and may be freed
 * afterwards.
 *
 * # Safety
 * `code` must be a live handle, `params` valid for one read and `out` for
 * one write.
 */
enum PbStatus pb_decoder_new(const struct PbCode *code,
                             const struct PbDecoderParams *params,
                             uint64_t seed,
                             struct PbDecoder **out);

/**
 * Releases a decoder. Null is ignored.
 *
 * # Safety
 * `decoder` must come from [`pb_decoder_new`] and not be used afterwards.
 */
void pb_decoder_free(struct PbDecoder *decoder);

/**
 * Decodes one frame of channel LLRs (positive favours 0). Writes the
 * payload estimate to `payload_out` and, if `result` is non-null, the
 * decode summary. A frame that fails its CRC is still `PB_STATUS_OK`;
 * check `crc_pass`.
 *
 * # Safety
 * `decoder` must be a live handle not used concurrently; `llr` valid for
 * `llr_len` reads, `payload_out` for `payload_len` writes, `result` null or
 * valid for one write.
 */
enum PbStatus pb_decoder_decode(struct PbDecoder *decoder,
                                const double *llr,
                                size_t llr_len,
                                uint8_t *payload_out,
                                size_t payload_len,
                                struct PbDecodeResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLAR_BP_H */
