/*
 * Copyright 2026 The bsval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the bsval library.
 *
 * Objects are opaque handles created by bsv_*_create/build/fit/load calls and
 * released with the matching bsv_*_free. Every call returns a bsv_status; on
 * failure bsv_last_error() describes the problem for the calling thread.
 * Patterns are passed as arrays of n ascending, 0-based mode indices.
 */
#ifndef BSVAL_BSVAL_H_
#define BSVAL_BSVAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BSV_BUILDING_LIBRARY)
#define BSV_API __declspec(dllexport)
#else
#define BSV_API __declspec(dllimport)
#endif
#else
#define BSV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsv_status {
  BSV_OK = 0,
  BSV_ERR_INVALID_ARGUMENT = 1,
  BSV_ERR_CONFIG = 2,
  BSV_ERR_NUMERICAL = 3,
  BSV_ERR_IO = 4,
  BSV_ERR_INTERNAL = 5
} bsv_status;

typedef enum bsv_law_kind {
  BSV_LAW_IDEAL = 0,
  BSV_LAW_PARTIAL = 1,
  BSV_LAW_APPROX = 2,
  BSV_LAW_UNIFORM = 3,
  BSV_LAW_DISTINGUISHABLE = 4
} bsv_law_kind;

typedef enum bsv_chi2_formula { BSV_CHI2_STANDARD = 0, BSV_CHI2_VERBATIM = 1 } bsv_chi2_formula;

typedef enum bsv_gaussian_method {
  BSV_GAUSS_MOMENTS = 0,
  BSV_GAUSS_HISTOGRAM_LSQ = 1
} bsv_gaussian_method;

typedef enum bsv_shell_comparator { BSV_SHELL_AT_MOST = 0, BSV_SHELL_AT_LEAST = 1 } bsv_shell_comparator;

typedef struct bsv_matrix bsv_matrix;
typedef struct bsv_table bsv_table;
typedef struct bsv_events bsv_events;
typedef struct bsv_clusters bsv_clusters;
typedef struct bsv_report bsv_report;

typedef struct bsv_law {
  bsv_law_kind kind;
  double x_ind;  /* partial and approx laws */
  int n_cutoff;  /* approx law only */
} bsv_law;

typedef struct bsv_gaussian {
  double center;
  double fwhm;
  double center_stderr;
} bsv_gaussian;

typedef struct bsv_shell {
  double total_prob;
  double mean_prob;
  double fraction_of_space;
  size_t count;
} bsv_shell;

/* Message for the last failed call on this thread; empty after success. */
BSV_API const char* bsv_last_error(void);
BSV_API const char* bsv_version(void);

/* Interferometer unitaries. */
BSV_API bsv_status bsv_matrix_haar(size_t m, uint64_t seed, bsv_matrix** out);
BSV_API bsv_status bsv_matrix_from_entries(size_t m, const double* re, const double* im,
                                           bsv_matrix** out);
BSV_API bsv_status bsv_matrix_load(const char* path, bsv_matrix** out);
BSV_API bsv_status bsv_matrix_save(const bsv_matrix* u, const char* path);
BSV_API bsv_status bsv_matrix_dim(const bsv_matrix* u, size_t* m);
BSV_API bsv_status bsv_matrix_entry(const bsv_matrix* u, size_t row, size_t col, double* re,
                                    double* im);
BSV_API bsv_status bsv_matrix_unitarity_residual(const bsv_matrix* u, double* residual);
BSV_API void bsv_matrix_free(bsv_matrix* u);

/* Permanent of a row-major n x n complex matrix (Ryser, n <= 30). */
BSV_API bsv_status bsv_permanent(size_t n, const double* re, const double* im, double* out_re,
                                 double* out_im);

/* Collision-free output distributions. input_modes may be NULL for {0..n-1}. */
BSV_API bsv_status bsv_table_build(const bsv_matrix* u, int n, bsv_law law,
                                   const int* input_modes, int threads, bsv_table** out);
BSV_API bsv_status bsv_table_size(const bsv_table* t, size_t* size);
BSV_API bsv_status bsv_table_prob(const bsv_table* t, size_t index, double* prob);
BSV_API bsv_status bsv_table_cfs_mass(const bsv_table* t, double* mass);
BSV_API bsv_status bsv_table_pattern(const bsv_table* t, size_t index, int* modes);
BSV_API bsv_status bsv_table_index_of(const bsv_table* t, const int* modes, size_t* index);
BSV_API bsv_status bsv_table_save(const bsv_table* t, const char* csv_path, const char* json_path,
                                  uint64_t seed);
BSV_API void bsv_table_free(bsv_table* t);

/* Event samplers. */
BSV_API bsv_status bsv_sample_exact(const bsv_table* t, size_t count, uint64_t seed,
                                    bsv_events** out);
BSV_API bsv_status bsv_sample_mcmc(const bsv_table* t, size_t count, size_t burn_in,
                                   size_t thinning, uint64_t seed, bsv_events** out);
BSV_API bsv_status bsv_events_size(const bsv_events* e, size_t* size);
BSV_API bsv_status bsv_events_photons(const bsv_events* e, int* n);
BSV_API bsv_status bsv_events_pattern(const bsv_events* e, size_t index, int* modes);
BSV_API bsv_status bsv_events_acceptance_rate(const bsv_events* e, double* rate);
BSV_API bsv_status bsv_events_save(const bsv_events* e, const char* csv_path, const char* json_path);
BSV_API void bsv_events_free(bsv_events* e);

/* k-means++ clustering of events. */
BSV_API bsv_status bsv_clusters_fit(const bsv_events* e, int k, uint64_t seed, int max_iter,
                                    double tol, bsv_clusters** out);
BSV_API bsv_status bsv_clusters_k(const bsv_clusters* c, int* k);
BSV_API bsv_status bsv_clusters_assign(const bsv_clusters* c, const int* modes, int n, int* cluster);
BSV_API bsv_status bsv_clusters_member_count(const bsv_clusters* c, int cluster, size_t* count);
BSV_API bsv_status bsv_clusters_save(const bsv_clusters* c, const char* json_path);
BSV_API void bsv_clusters_free(bsv_clusters* c);

/* Statistics. */
BSV_API bsv_status bsv_chi2(const double* first, const double* second, size_t k,
                            bsv_chi2_formula formula, double* out);
/* Fills values[0..trials) with one chi2 per trial and fits a Gaussian. */
BSV_API bsv_status bsv_chi2_trials(const bsv_clusters* c, const bsv_events* pool,
                                   size_t events_per_trial, size_t trials, uint64_t seed,
                                   bsv_chi2_formula formula, int threads, double* values,
                                   bsv_gaussian* fit);
BSV_API bsv_status bsv_gaussian_fit(const double* values, size_t count, bsv_gaussian_method method,
                                    bsv_gaussian* out);
BSV_API bsv_status bsv_r1(double c0, double c_threshold, double c1, double* out);
BSV_API bsv_status bsv_r2(double c_threshold, double c1, double b_threshold, double* out);
BSV_API bsv_status bsv_bayes_slope(const bsv_events* e, const bsv_table* ideal, double* slope);
BSV_API bsv_status bsv_tvd(const bsv_table* p, const bsv_table* q, double* out);
BSV_API bsv_status bsv_shell_probability(const bsv_table* t, bsv_shell_comparator comparator,
                                         double threshold, bsv_shell* out);

/* Experiment commands. config_json may be NULL or "" for defaults; the report
 * directory receives manifest.json, summary.json and data files. */
BSV_API bsv_status bsv_run_command(const char* command, const char* config_json,
                                   const char* out_dir, bsv_report** out);
/* Summary JSON owned by the report; valid until bsv_report_free. */
BSV_API const char* bsv_report_summary(const bsv_report* r);
BSV_API void bsv_report_free(bsv_report* r);

#ifdef __cplusplus
}
#endif

#endif  // BSVAL_BSVAL_H_
