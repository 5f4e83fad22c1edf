/* Copyright 2026 The SQEM Developers. Licensed under the Apache License, Version 2.0. */

#ifndef SQEM_H
#define SQEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum SqemStatus {
  SQEM_STATUS_OK = 0,
  SQEM_STATUS_NULL_POINTER = 1,
  SQEM_STATUS_INVALID_UTF8 = 2,
  SQEM_STATUS_PARSE = 3,
  SQEM_STATUS_VALIDATION = 4,
  SQEM_STATUS_EXECUTION = 5,
  SQEM_STATUS_NOT_CONVERGED = 6,
  SQEM_STATUS_PANIC = 7,
} SqemStatus;

/**
 * Check unitary selection for [`sqem_run_job`].
 */
typedef enum SqemFrame {
  SQEM_FRAME_AUTO = 0,
  SQEM_FRAME_PLAIN = 1,
} SqemFrame;

/**
 * Parsed circuit.
 */
typedef struct SqemCircuit SqemCircuit;

/**
 * Probability or quasi-probability distribution over bit strings.
 */
typedef struct SqemDistribution SqemDistribution;

/**
 * Noise model.
 */
typedef struct SqemNoise SqemNoise;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sqem_version(void);

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *sqem_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library that has not been freed.
 */
void sqem_string_free(char *s);

/**
 * Parse a circuit from its text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SqemStatus sqem_circuit_parse(const char *text, struct SqemCircuit **out);

/**
 * Number of qubits of a circuit, or 0 for NULL.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t sqem_circuit_num_qubits(const struct SqemCircuit *circuit);

/**
 * # Safety
 * `circuit` must be NULL or a handle that has not been freed.
 */
void sqem_circuit_free(struct SqemCircuit *circuit);

/**
 * Build a depolarizing noise model with one- and two-qubit error rates.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum SqemStatus sqem_noise_depolarizing(double p1, double p2, struct SqemNoise **out);

/**
 * Parse a noise model from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SqemStatus sqem_noise_from_json(const char *json, struct SqemNoise **out);

/**
 * # Safety
 * `noise` must be NULL or a handle that has not been freed.
 */
void sqem_noise_free(struct SqemNoise *noise);

/**
 * Run a circuit and return its output distribution. `noise` may be NULL for a
 * noiseless run; `shots == 0` evaluates the exact distribution.
 *
 * # Safety
 * Handles must be live (or NULL for `noise`) and `out` writable.
 */
enum SqemStatus sqem_simulate(const struct SqemCircuit *circuit,
                              const struct SqemNoise *noise,
                              uint64_t shots,
                              uint64_t seed,
                              struct SqemDistribution **out);

/**
 * Parse a distribution from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SqemStatus sqem_distribution_from_json(const char *json, struct SqemDistribution **out);

/**
 * Serialize a distribution to JSON; free the result with [`sqem_string_free`].
 *
 * # Safety
 * `dist` must be a live handle and `out` writable.
 */
enum SqemStatus sqem_distribution_to_json(const struct SqemDistribution *dist, char **out);

/**
 * Number of bits of a distribution, or 0 for NULL.
 *
 * # Safety
 * `dist` must be NULL or a live handle.
 */
size_t sqem_distribution_num_bits(const struct SqemDistribution *dist);

/**
 * Probability of the outcome `key`, where bit `k` of `key` is qubit `k`.
 *
 * # Safety
 * `dist` must be a live handle and `out` writable.
 */
enum SqemStatus sqem_distribution_get(const struct SqemDistribution *dist,
                                      uint64_t key,
                                      double *out);

/**
 * Marginal probabilities `[P(bit k = 0), P(bit k = 1)]` written to `out[0..2]`.
 *
 * # Safety
 * `dist` must be a live handle and `out` must point to two writable doubles.
 */
enum SqemStatus sqem_distribution_marginal(const struct SqemDistribution *dist,
                                           size_t bit,
                                           double *out);

/**
 * # Safety
 * `dist` must be NULL or a handle that has not been freed.
 */
void sqem_distribution_free(struct SqemDistribution *dist);

/**
 * Hellinger distance between two probability distributions.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum SqemStatus sqem_hellinger(const struct SqemDistribution *p,
                               const struct SqemDistribution *q,
                               double *out);

/**
 * Run one mitigation job protecting `qubit` and return the post-selected
 * distribution. `shots == 0` runs every fragment exactly. `retained` may be NULL.
 *
 * # Safety
 * Handles must be live, `out` writable and `retained` NULL or writable.
 */
enum SqemStatus sqem_run_job(const struct SqemCircuit *circuit,
                             const struct SqemNoise *noise,
                             size_t qubit,
                             enum SqemFrame frame,
                             uint64_t shots,
                             uint64_t seed,
                             struct SqemDistribution **out,
                             double *retained);

/**
 * Merge an unmitigated distribution with `count` per-qubit mitigated ones,
 * where `mitigated[i]` protects bit `qubits[i]`. The result is written even when
 * the iteration cap is hit, in which case the status is `NOT_CONVERGED`.
 * `delta` may be NULL; otherwise it receives the largest remaining marginal
 * deviation.
 *
 * # Safety
 * `qubits` and `mitigated` must point to `count` elements, every handle must be
 * live, `out` writable and `delta` NULL or writable.
 */
enum SqemStatus sqem_recombine(const struct SqemDistribution *unmitigated,
                               const size_t *qubits,
                               const struct SqemDistribution *const *mitigated,
                               size_t count,
                               double threshold,
                               size_t max_iterations,
                               struct SqemDistribution **out,
                               double *delta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQEM_H */
