/*
 * cbcw — choice-based conjoint workbench.
 *
 * C interface of the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * cbcw_status and leaves a thread-local message readable via
 * cbcw_last_error(). Returned strings belong to the library: const char*
 * results stay valid while the owning handle lives, char** results must be
 * released with cbcw_string_free().
 */

#ifndef CBCW_H
#define CBCW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbcw_status {
  CBCW_OK = 0,
  CBCW_ERR_INVALID_ARGUMENT = 1,
  CBCW_ERR_PARSE = 2,
  CBCW_ERR_IO = 3,
  CBCW_ERR_NUMERIC = 4,
  CBCW_ERR_EMPTY_MODEL = 5,
  CBCW_ERR_UNRELIABLE = 6,
  CBCW_ERR_INTERNAL = 7
} cbcw_status;

/* Message for the most recent failure on the calling thread. */
const char* cbcw_last_error(void);

typedef struct cbcw_catalog cbcw_catalog;
typedef struct cbcw_design cbcw_design;
typedef struct cbcw_dataset cbcw_dataset;
typedef struct cbcw_fit cbcw_fit;
typedef struct cbcw_pipeline cbcw_pipeline;
typedef struct cbcw_bootstrap cbcw_bootstrap;
typedef struct cbcw_report cbcw_report;

/* ---------------- attribute catalogs ---------------- */

/* The 11 two-level poverty indicators (N, CAM, YS, SA, CF, H, S, MH, A, DW, E). */
cbcw_status cbcw_catalog_mpi(cbcw_catalog** out);
/* Generic catalog of n attributes named X01..Xnn. */
cbcw_status cbcw_catalog_generic(size_t n, cbcw_catalog** out);
/* heads[i] is one of "health", "education", "living". */
cbcw_status cbcw_catalog_create(const char* const* codes, const char* const* heads, size_t n,
                                cbcw_catalog** out);
void cbcw_catalog_free(cbcw_catalog* catalog);
size_t cbcw_catalog_size(const cbcw_catalog* catalog);
const char* cbcw_catalog_code(const cbcw_catalog* catalog, size_t index);
const char* cbcw_catalog_head(const cbcw_catalog* catalog, size_t index);

/* ---------------- designs ---------------- */

cbcw_status cbcw_design_load(const cbcw_catalog* catalog, const char* path, cbcw_design** out);
cbcw_status cbcw_design_save(const cbcw_design* design, const char* path);
/* Coordinate-exchange search; with_interactions selects the optimality
 * target (mains only vs mains plus all two-factor interactions).
 * iterations/restarts <= 0 pick the defaults. */
cbcw_status cbcw_design_generate(const cbcw_catalog* catalog, int strength, int n_pairs,
                                 int with_interactions, uint64_t seed, int iterations,
                                 int restarts, cbcw_design** out);
cbcw_status cbcw_design_prune(const cbcw_design* design, cbcw_design** out);
cbcw_status cbcw_design_block(const cbcw_design* design, int blocks, uint64_t seed,
                              cbcw_design** out);
/* D-criterion det(M/n)^(1/q) at theta = 0 for the selected term set. */
cbcw_status cbcw_design_criterion(const cbcw_design* design, int with_interactions,
                                  double* out_value);
/* Same, with the term set and coefficients read from a #cbcw-theta file. */
cbcw_status cbcw_design_criterion_at(const cbcw_design* design, const char* theta_path,
                                     double* out_value);
void cbcw_design_free(cbcw_design* design);
size_t cbcw_design_pair_count(const cbcw_design* design);
int cbcw_design_strength(const cbcw_design* design);
size_t cbcw_design_dominated_count(const cbcw_design* design);
size_t cbcw_design_block_count(const cbcw_design* design);

/* ---------------- datasets ---------------- */

cbcw_status cbcw_dataset_load(const cbcw_catalog* catalog, const char* design_path,
                              const char* respondents_path, const char* choices_path,
                              cbcw_dataset** out);
/* Cell counts are indexed gender-major:
 * F/age<=40/below10, F/<=40/10th+, F/>40/below10, F/>40/10th+, then male. */
cbcw_status cbcw_dataset_simulate(const cbcw_design* design, const char* const* terms,
                                  const double* values, size_t n_terms,
                                  const size_t cell_counts[8], uint64_t seed, cbcw_dataset** out);
cbcw_status cbcw_dataset_simulate_file(const cbcw_design* design, const char* theta_path,
                                       const size_t cell_counts[8], uint64_t seed,
                                       cbcw_dataset** out);
cbcw_status cbcw_dataset_save(const cbcw_dataset* dataset, const char* respondents_path,
                              const char* choices_path);
void cbcw_dataset_free(cbcw_dataset* dataset);
size_t cbcw_dataset_respondent_count(const cbcw_dataset* dataset);
size_t cbcw_dataset_observation_count(const cbcw_dataset* dataset);

/* Segment selector; -1 leaves a field unrestricted.
 * gender: 0 = female, 1 = male;  age_side: 0 = age <= 40, 1 = age > 40;
 * education: 0 = below 10th standard, 1 = 10th pass or more. */
typedef struct cbcw_segment {
  int gender;
  int age_side;
  int education;
} cbcw_segment;

/* ---------------- fitting ---------------- */

/* Mains-only maximum-likelihood fit on the (optionally filtered) dataset. */
cbcw_status cbcw_fit_linear(const cbcw_dataset* dataset, const cbcw_segment* segment,
                            double alpha, cbcw_fit** out);
/* Full pipeline: linear fit, one-batch elimination of insignificant
 * attributes, then the interaction fit on the retained set. */
cbcw_status cbcw_pipeline_run(const cbcw_dataset* dataset, const cbcw_segment* segment,
                              double alpha, cbcw_pipeline** out);
void cbcw_pipeline_free(cbcw_pipeline* pipeline);
const cbcw_fit* cbcw_pipeline_linear_full(const cbcw_pipeline* pipeline);
const cbcw_fit* cbcw_pipeline_linear_reduced(const cbcw_pipeline* pipeline);
const cbcw_fit* cbcw_pipeline_interactions(const cbcw_pipeline* pipeline);
size_t cbcw_pipeline_dropped_count(const cbcw_pipeline* pipeline);
const char* cbcw_pipeline_dropped_code(const cbcw_pipeline* pipeline, size_t index);

void cbcw_fit_free(cbcw_fit* fit);
size_t cbcw_fit_term_count(const cbcw_fit* fit);
const char* cbcw_fit_term_name(const cbcw_fit* fit, size_t index);
cbcw_status cbcw_fit_estimate(const cbcw_fit* fit, size_t index, double* out);
cbcw_status cbcw_fit_z(const cbcw_fit* fit, size_t index, double* out);
cbcw_status cbcw_fit_p_value(const cbcw_fit* fit, size_t index, double* out);
int cbcw_fit_significant(const cbcw_fit* fit, size_t index);
int cbcw_fit_separation_flag(const cbcw_fit* fit, size_t index);
int cbcw_fit_converged(const cbcw_fit* fit);
double cbcw_fit_log_likelihood(const cbcw_fit* fit);
double cbcw_fit_aic(const cbcw_fit* fit);

/* ---------------- bootstrap ---------------- */

/* Stratified respondent bootstrap holding the reference fit's term set
 * fixed. Returns CBCW_ERR_UNRELIABLE (with the summary still produced) when
 * more than 20% of the replicates fail to converge. */
cbcw_status cbcw_bootstrap_run(const cbcw_dataset* dataset, const cbcw_fit* reference,
                               int replicates, uint64_t seed, double alpha, cbcw_bootstrap** out);
void cbcw_bootstrap_free(cbcw_bootstrap* bootstrap);
size_t cbcw_bootstrap_term_count(const cbcw_bootstrap* bootstrap);
const char* cbcw_bootstrap_term_name(const cbcw_bootstrap* bootstrap, size_t index);
cbcw_status cbcw_bootstrap_observed(const cbcw_bootstrap* b, size_t index, double* out);
cbcw_status cbcw_bootstrap_mean(const cbcw_bootstrap* b, size_t index, double* out);
cbcw_status cbcw_bootstrap_se(const cbcw_bootstrap* b, size_t index, double* out);
cbcw_status cbcw_bootstrap_z(const cbcw_bootstrap* b, size_t index, double* out);
cbcw_status cbcw_bootstrap_p_value(const cbcw_bootstrap* b, size_t index, double* out);
/* use_percentile = 0 picks the reflected (basic) interval. */
cbcw_status cbcw_bootstrap_ci(const cbcw_bootstrap* b, size_t index, int use_percentile,
                              double* out_lo, double* out_hi);
int cbcw_bootstrap_significant(const cbcw_bootstrap* b, size_t index, int use_percentile);
int cbcw_bootstrap_failed_replicates(const cbcw_bootstrap* b);
int cbcw_bootstrap_reliable(const cbcw_bootstrap* b);
int cbcw_default_bootstrap_replicates(void); /* 10000 */

/* ---------------- interpretation and rendering ---------------- */

cbcw_status cbcw_report_build(const cbcw_fit* interaction_fit, double alpha, cbcw_report** out);
void cbcw_report_free(cbcw_report* report);
size_t cbcw_report_edge_count(const cbcw_report* report);
size_t cbcw_report_significant_count(const cbcw_report* report);
cbcw_status cbcw_report_write_graph(const cbcw_report* report, const char* path);

/* format: 0 = fixed width, 1 = tab delimited. */
cbcw_status cbcw_render_fit(const cbcw_fit* fit, int format, char** out);
cbcw_status cbcw_render_pipeline(const cbcw_pipeline* pipeline, int format, char** out);
cbcw_status cbcw_render_bootstrap(const cbcw_bootstrap* bootstrap, int format, int use_percentile,
                                  char** out);
cbcw_status cbcw_render_report(const cbcw_report* report, int format, char** out);
cbcw_status cbcw_render_graph(const cbcw_report* report, char** out);
void cbcw_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CBCW_H */
