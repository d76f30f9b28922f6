#ifndef PGCOPULA_H
#define PGCOPULA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PGC_FAMILY_GAUSSIAN 0

#define PGC_FAMILY_T 1

typedef enum PgcStatus {
  PGC_STATUS_OK = 0,
  PGC_STATUS_NULL_POINTER = 1,
  /**
   * Argument outside a function's mathematical domain.
   */
  PGC_STATUS_DOMAIN = 2,
  PGC_STATUS_INVALID_ARGUMENT = 3,
  /**
   * Numerical breakdown: non-finite values or a non-positive-definite matrix.
   */
  PGC_STATUS_NUMERICAL = 4,
  PGC_STATUS_IO = 5,
  PGC_STATUS_DIAGNOSTICS = 6,
  PGC_STATUS_PANIC = 7,
} PgcStatus;

typedef struct PgcChain PgcChain;

typedef struct PgcDataset PgcDataset;

typedef struct PgcModel PgcModel;

/**
 * Sampler settings; start from `pgc_mcmc_config_default`.
 */
typedef struct PgcMcmcConfig {
  size_t iterations;
  size_t burn_in;
  size_t thin;
  uint64_t seed;
  double initial_step;
  double initial_rho_step;
  double initial_nu_step;
  double initial_nu;
  size_t adaptation_window;
  double target_acceptance;
  size_t stage2_burn_in;
  size_t stage2_sweeps;
} PgcMcmcConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or "" if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *pgc_last_error(void);

struct PgcMcmcConfig pgc_mcmc_config_default(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PgcStatus pgc_pg_log_pdf(double theta, double alpha1, double alpha2, double beta, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PgcStatus pgc_pg_cdf(double theta, double alpha1, double alpha2, double beta, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PgcStatus pgc_pg_quantile(double p, double alpha1, double alpha2, double beta, double *out);

/**
 * Builds a model from `m` marginal triples `(alpha1, alpha2, beta)` stored
 * back to back, the `m(m-1)/2` upper-triangle correlations in row order,
 * and `nu` (ignored for the Gaussian family).
 *
 * # Safety
 * `marginals` must hold `3 * m` values, `upper` `m * (m - 1) / 2` values,
 * and `out` must be valid for writes.
 */
enum PgcStatus pgc_model_new(size_t m,
                             const double *marginals,
                             int32_t family_code,
                             const double *upper,
                             double nu,
                             struct PgcModel **out);

/**
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void pgc_model_free(struct PgcModel *model);

/**
 * # Safety
 * `model` must be a live handle, `theta` must hold `m` values and `out`
 * must be valid for writes.
 */
enum PgcStatus pgc_model_joint_log_pdf(const struct PgcModel *model,
                                       const double *theta,
                                       size_t m,
                                       double *out);

/**
 * # Safety
 * `values` must hold `n * m` row-major radians and `out` must be valid
 * for writes.
 */
enum PgcStatus pgc_dataset_new(size_t n, size_t m, const double *values, struct PgcDataset **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum PgcStatus pgc_dataset_read_csv(const char *path_, bool degrees, struct PgcDataset **out);

/**
 * # Safety
 * `data` must be a live handle and `path` a NUL-terminated string.
 */
enum PgcStatus pgc_dataset_write_csv(const struct PgcDataset *data,
                                     const char *path_,
                                     bool degrees);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `data` must be null or a live handle.
 */
size_t pgc_dataset_rows(const struct PgcDataset *data);

/**
 * Number of columns, or 0 for a null handle.
 *
 * # Safety
 * `data` must be null or a live handle.
 */
size_t pgc_dataset_cols(const struct PgcDataset *data);

/**
 * # Safety
 * `data` must come from this library and not be used afterwards.
 */
void pgc_dataset_free(struct PgcDataset *data);

/**
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum PgcStatus pgc_simulate(const struct PgcModel *model,
                            size_t n,
                            uint64_t seed,
                            struct PgcDataset **out);

/**
 * # Safety
 * Both handles must be live and `out` valid for writes.
 */
enum PgcStatus pgc_log_likelihood(const struct PgcDataset *data,
                                  const struct PgcModel *model,
                                  double *out);

/**
 * Runs the two-stage sampler with the default priors.
 *
 * # Safety
 * `data` and `config` must be valid and `out` valid for writes.
 */
enum PgcStatus pgc_fit(const struct PgcDataset *data,
                       int32_t family_code,
                       const struct PgcMcmcConfig *config,
                       struct PgcChain **out);

/**
 * Number of retained draws, or 0 for a null handle.
 *
 * # Safety
 * `chain` must be null or a live handle.
 */
size_t pgc_chain_len(const struct PgcChain *chain);

/**
 * Number of parameters per draw, or 0 for a null handle.
 *
 * # Safety
 * `chain` must be null or a live handle.
 */
size_t pgc_chain_n_params(const struct PgcChain *chain);

/**
 * Copies the draws row-major (one row per draw, columns in CSV order)
 * into `buf`, which must hold `len` values with
 * `len == pgc_chain_len * pgc_chain_n_params`.
 *
 * # Safety
 * `chain` must be a live handle and `buf` valid for `len` writes.
 */
enum PgcStatus pgc_chain_draws(const struct PgcChain *chain, double *buf, size_t len);

/**
 * # Safety
 * Both handles must be live and `out` valid for writes.
 */
enum PgcStatus pgc_chain_lpml(const struct PgcChain *chain,
                              const struct PgcDataset *data,
                              double *out);

/**
 * # Safety
 * `chain` must be a live handle and `path` a NUL-terminated string.
 */
enum PgcStatus pgc_chain_write_csv(const struct PgcChain *chain, const char *path_);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum PgcStatus pgc_chain_read_csv(const char *path_, struct PgcChain **out);

/**
 * # Safety
 * `chain` must come from this library and not be used afterwards.
 */
void pgc_chain_free(struct PgcChain *chain);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PGCOPULA_H */
