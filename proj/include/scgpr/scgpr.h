// SPDX-License-Identifier: Apache-2.0
//
// scgpr: correlated-MIMO channel estimation with spatial-correlation kernels
// Copyright (C) 2026 The scgpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/* C interface to the scgpr channel-estimation library.
 *
 * Conventions
 *   - Every fallible call returns scgpr_status; on failure a message is
 *     available from scgpr_last_error() on the calling thread.
 *   - Matrices are dense, column-major, as arrays of scgpr_complex. A channel
 *     is N_r x N_t; a covariance is (N_r N_t) x (N_r N_t) over the
 *     column-wise vectorized channel (entry (r, t) -> r + t N_r, 0-based).
 *   - Handles are opaque, immutable after creation except experiments, and
 *     released with the matching *_free function (NULL is accepted).
 *   - Strings returned through char ** are owned by the caller and released
 *     with scgpr_string_free.
 */

#ifndef SCGPR_SCGPR_H
#define SCGPR_SCGPR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SCGPR_BUILDING_LIBRARY)
#    define SCGPR_API __declspec(dllexport)
#  else
#    define SCGPR_API __declspec(dllimport)
#  endif
#else
#  define SCGPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scgpr_status
{
    SCGPR_OK = 0,
    SCGPR_E_INVALID_ARGUMENT = 1,
    SCGPR_E_SHAPE_MISMATCH = 2,
    SCGPR_E_NOT_POSITIVE_DEFINITE = 3,
    SCGPR_E_ILL_CONDITIONED = 4,
    SCGPR_E_INIT_FAILURE = 5,
    SCGPR_E_IO = 6,
    SCGPR_E_NULL_POINTER = 7,
    SCGPR_E_INTERNAL = 8
} scgpr_status;

/* Same layout as C99 double _Complex and std::complex<double>. */
typedef struct scgpr_complex
{
    double re;
    double im;
} scgpr_complex;

typedef enum scgpr_kernel_family
{
    SCGPR_KERNEL_SC = 0,
    SCGPR_KERNEL_RBF = 1,
    SCGPR_KERNEL_MATERN15 = 2,
    SCGPR_KERNEL_RQ = 3
} scgpr_kernel_family;

typedef struct scgpr_kernel_params
{
    scgpr_kernel_family family;
    double scale;       /* ignored by SC */
    double lengthscale; /* ignored by SC */
    double rq_alpha;    /* RQ only */
} scgpr_kernel_params;

typedef struct scgpr_covariance scgpr_covariance;
typedef struct scgpr_plan scgpr_plan;
typedef struct scgpr_estimate scgpr_estimate;
typedef struct scgpr_experiment scgpr_experiment;

typedef void (*scgpr_log_fn)(const char *message, void *user);

SCGPR_API const char *scgpr_version(void);
SCGPR_API const char *scgpr_status_name(scgpr_status status);
/* Message of the last failed call on this thread ("" if none). */
SCGPR_API const char *scgpr_last_error(void);
SCGPR_API void scgpr_string_free(char *s);

/* ---- covariance ------------------------------------------------------ */

/* model: "Kronecker" or "Weichselberger". geometry_json may be NULL or an
 * object with spacing_wl, center_tx_rad, center_rx_rad, spread_rad. */
SCGPR_API scgpr_status scgpr_covariance_model(const char *model, int n_rx, int n_tx, const char *geometry_json,
                                              uint64_t coupling_seed, scgpr_covariance **out);

/* Validates Hermitian symmetry, unit diagonal and positive semidefiniteness. */
SCGPR_API scgpr_status scgpr_covariance_from_matrix(int n_rx, int n_tx, const scgpr_complex *r,
                                                    scgpr_covariance **out);

SCGPR_API scgpr_status scgpr_covariance_shape(const scgpr_covariance *cov, int *n_rx, int *n_tx);
/* Copies the (N_r N_t)^2 matrix; len is the capacity of out in elements. */
SCGPR_API scgpr_status scgpr_covariance_copy(const scgpr_covariance *cov, scgpr_complex *out, size_t len);
SCGPR_API void scgpr_covariance_free(scgpr_covariance *cov);

/* h_out receives N_r N_t entries drawn as R_H^{1/2} g. */
SCGPR_API scgpr_status scgpr_sample_channel(const scgpr_covariance *cov, uint64_t seed, scgpr_complex *h_out);

/* ---- sounding -------------------------------------------------------- */

/* pilot_len 0 selects the minimum length (number of active antennas). */
SCGPR_API scgpr_status scgpr_plan_create(int n_rx, int n_tx, int stride, int pilot_len, scgpr_plan **out);
SCGPR_API scgpr_status scgpr_plan_info(const scgpr_plan *plan, int *n_active, int *pilot_len);
/* active_out receives n_active 0-based transmit indices. */
SCGPR_API scgpr_status scgpr_plan_active(const scgpr_plan *plan, int *active_out);
SCGPR_API void scgpr_plan_free(scgpr_plan *plan);

/* De-spread observation H F + W (N_r x n_active) with seeded noise. */
SCGPR_API scgpr_status scgpr_observe(const scgpr_plan *plan, const scgpr_complex *h, double noise_var, uint64_t seed,
                                     scgpr_complex *y_out);

/* ---- estimation ------------------------------------------------------ */

/* GPR reconstruction from a de-spread observation y (N_r x n_active).
 * cov is required for SCGPR_KERNEL_SC and ignored otherwise. */
SCGPR_API scgpr_status scgpr_estimate_gpr(const scgpr_covariance *cov, const scgpr_kernel_params *kernel,
                                          const scgpr_plan *plan, const scgpr_complex *y, double noise_var,
                                          scgpr_estimate **out);

/* Fits scale/lengthscale[/alpha] of a distance kernel by maximizing the log
 * evidence from its current values for max_iters iterations. */
SCGPR_API scgpr_status scgpr_fit_kernel(const scgpr_plan *plan, const scgpr_complex *y, double noise_var,
                                        int max_iters, scgpr_kernel_params *kernel);

/* h_out: N_r N_t estimate; var_out (nullable): per-entry posterior variance;
 * jitter_out (nullable): diagonal load used by the factorization. */
SCGPR_API scgpr_status scgpr_estimate_copy(const scgpr_estimate *est, scgpr_complex *h_out, double *var_out,
                                           double *jitter_out);
SCGPR_API void scgpr_estimate_free(scgpr_estimate *est);

/* Least squares from full received pilots Y (N_r x T) and pilot S (N_t x T). */
SCGPR_API scgpr_status scgpr_ls_estimate(int n_rx, int n_tx, int pilot_len, const scgpr_complex *y,
                                         const scgpr_complex *pilot, scgpr_complex *h_out);

/* ---- metrics --------------------------------------------------------- */

SCGPR_API scgpr_status scgpr_nmse_db(int n_rx, int n_tx, const scgpr_complex *h_true, const scgpr_complex *h_est,
                                     double *out);
SCGPR_API scgpr_status scgpr_spectral_efficiency(int n_rx, int n_tx, const scgpr_complex *h_true,
                                                 const scgpr_complex *h_est, double snr_linear, double *se_true,
                                                 double *se_est);

/* ---- experiments ----------------------------------------------------- */

/* config_json: see README for keys; missing keys take defaults. */
SCGPR_API scgpr_status scgpr_experiment_create(const char *config_json, scgpr_experiment **out);
/* Runs the Monte Carlo loop. With write_files != 0 results.csv,
 * summary.json and meta.json go to the configured output_dir. log may be
 * NULL. */
SCGPR_API scgpr_status scgpr_experiment_run(scgpr_experiment *exp, int write_files, scgpr_log_fn log, void *user);
SCGPR_API scgpr_status scgpr_experiment_config_json(const scgpr_experiment *exp, char **out);
/* Available after a successful run. */
SCGPR_API scgpr_status scgpr_experiment_summary_json(const scgpr_experiment *exp, char **out);
SCGPR_API scgpr_status scgpr_experiment_meta_json(const scgpr_experiment *exp, char **out);
SCGPR_API scgpr_status scgpr_experiment_results_csv(const scgpr_experiment *exp, char **out);
SCGPR_API void scgpr_experiment_free(scgpr_experiment *exp);

/* Timing harness. request_json keys: sizes, stride, estimators, fit_iters,
 * repetitions, snr_db, model, seed. */
SCGPR_API scgpr_status scgpr_timing_scan(const char *request_json, char **report_json);

#ifdef __cplusplus
}
#endif

#endif /* SCGPR_SCGPR_H */
