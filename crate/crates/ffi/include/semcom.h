#ifndef SEMCOM_H
#define SEMCOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SemcomStatus {
  SEMCOM_STATUS_OK = 0,
  SEMCOM_STATUS_NULL_POINTER = 1,
  SEMCOM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Overflow, vanishing marginal or quadrature that did not settle.
   */
  SEMCOM_STATUS_NUMERIC = 3,
  /**
   * Malformed `SFF1` bytes.
   */
  SEMCOM_STATUS_WIRE = 4,
  /**
   * Malformed JSON input.
   */
  SEMCOM_STATUS_PARSE = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  SEMCOM_STATUS_INTERNAL = 6,
} SemcomStatus;

typedef enum SemcomCompletion {
  SEMCOM_COMPLETION_PRIOR_MEAN = 0,
  SEMCOM_COMPLETION_PRIOR_SAMPLE = 1,
} SemcomCompletion;

/**
 * Opaque channel configuration.
 */
typedef struct SemcomChannel SemcomChannel;

/**
 * Opaque feature frame.
 */
typedef struct SemcomFrame SemcomFrame;

/**
 * Bytes owned by the library.
 */
typedef struct SemcomBuffer {
  uint8_t *data;
  size_t len;
} SemcomBuffer;

typedef struct SemcomRdpPoint {
  double rate_bits;
  double distortion;
  double perception_bits;
  double alpha;
  double mu;
  uint64_t iterations;
  bool converged;
} SemcomRdpPoint;

typedef struct SemcomRunReport {
  uint64_t frames_sent;
  uint64_t frames_failed;
  uint64_t payload_bytes;
  uint64_t raw_bytes;
  double compression_ratio;
  double psnr_db;
  /**
   * NaN when the run was error free.
   */
  double measured_snr_db;
  double wall_time_ms;
} SemcomRunReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *semcom_last_error_message(void);

void semcom_buffer_free(struct SemcomBuffer buffer);

/**
 * Entropy in bits of a probability vector.
 */
enum SemcomStatus semcom_entropy(const double *probs, size_t len, double *out);

/**
 * `KL(p || q)` in bits over a shared index alphabet.
 */
enum SemcomStatus semcom_kl_divergence(const double *p, const double *q, size_t len, double *out);

/**
 * Mutual information in bits of a row-major `rows x cols` joint pmf.
 */
enum SemcomStatus semcom_mutual_information(const double *joint,
                                            size_t rows,
                                            size_t cols,
                                            double *out);

/**
 * Solves one rate-distortion-perception point. `recon` may be NULL to use
 * the source alphabet. `tolerance <= 0` or `max_iterations == 0` select the
 * defaults.
 */
enum SemcomStatus semcom_rdp_solve(const double *alphabet,
                                   const double *probs,
                                   size_t len,
                                   const double *recon,
                                   size_t recon_len,
                                   double alpha,
                                   double mu,
                                   double tolerance,
                                   uint64_t max_iterations,
                                   struct SemcomRdpPoint *out);

/**
 * `1/2 log2(1 + SNR)` in bits per channel use.
 */
double semcom_capacity_lower(double snr_db);

/**
 * KL gap in bits between the semantic noise and its equivalent Gaussian.
 */
enum SemcomStatus semcom_kl_gap(double a, double b, double sigma_p2, double *out);

/**
 * Channel without fading or quantizer. An infinite `snr_db` is noiseless.
 */
enum SemcomStatus semcom_channel_new(double a,
                                     double b,
                                     double sigma_p2,
                                     double snr_db,
                                     uint64_t seed,
                                     struct SemcomChannel **out);

/**
 * Channel from a NUL-terminated ChannelConfig JSON document.
 */
enum SemcomStatus semcom_channel_from_json(const char *json, struct SemcomChannel **out);

/**
 * Enables slow Rayleigh fading with `E[g^2] = sigma_h2`.
 */
enum SemcomStatus semcom_channel_set_rayleigh(struct SemcomChannel *channel, double sigma_h2);

/**
 * Sends `len` symbols as frame `frame_id`. `received` must hold `len`
 * values; `gains` may be NULL.
 */
enum SemcomStatus semcom_channel_transmit(const struct SemcomChannel *channel,
                                          const double *x,
                                          size_t len,
                                          uint64_t frame_id,
                                          double *received,
                                          double *gains);

void semcom_channel_free(struct SemcomChannel *channel);

/**
 * Frame of `len` features. `mask` holds one byte per feature (non-zero =
 * selected) and may be NULL to select all.
 */
enum SemcomStatus semcom_frame_new(uint64_t frame_id,
                                   const float *features,
                                   size_t len,
                                   const uint8_t *mask,
                                   struct SemcomFrame **out);

/**
 * Encodes a frame as `SFF1`.
 */
enum SemcomStatus semcom_frame_encode(const struct SemcomFrame *frame, struct SemcomBuffer *out);

/**
 * Decodes the first `SFF1` frame of `bytes`. Features that were not
 * transmitted read as 0. `consumed` may be NULL.
 */
enum SemcomStatus semcom_frame_decode(const uint8_t *bytes,
                                      size_t len,
                                      struct SemcomFrame **out,
                                      size_t *consumed);

/**
 * Number of features, 0 for NULL.
 */
size_t semcom_frame_len(const struct SemcomFrame *frame);

uint64_t semcom_frame_id(const struct SemcomFrame *frame);

bool semcom_frame_is_selected(const struct SemcomFrame *frame, size_t index);

/**
 * Copies the features into `out`, which must hold `len` values.
 */
enum SemcomStatus semcom_frame_features(const struct SemcomFrame *frame, float *out, size_t len);

void semcom_frame_free(struct SemcomFrame *frame);

/**
 * Runs the pipeline over an `SFF1` stream. The completed frames are written
 * to `frames_out` as a fully selected stream (may be NULL). Per-frame
 * failures are counted in the report, not returned as an error.
 */
enum SemcomStatus semcom_pipeline_run(const struct SemcomChannel *channel,
                                      const uint8_t *bytes,
                                      size_t len,
                                      enum SemcomCompletion completion,
                                      uint64_t completion_seed,
                                      struct SemcomBuffer *frames_out,
                                      struct SemcomRunReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMCOM_H */
