/* C interface to the pmaint library.
 *
 * Every fallible call returns a pm_status; on failure pm_last_error() holds
 * a message for the calling thread until its next failing call. Handles are
 * opaque and owned by the caller. Timestamps are Unix seconds (UTC), money
 * is integer cents.
 */
#ifndef PMAINT_H
#define PMAINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PM_API __declspec(dllexport)
#else
#define PM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pm_status {
    PM_OK = 0,
    PM_ERR_INVALID_ARGUMENT = 1,
    PM_ERR_PARSE = 2,
    PM_ERR_ALIGNMENT = 3,
    PM_ERR_REFERENCE = 4,
    PM_ERR_RANGE = 5,
    PM_ERR_DATA = 6,
    PM_ERR_SINGULAR = 7,
    PM_ERR_CALIBRATION = 8,
    PM_ERR_EMPTY_DISTRIBUTION = 9,
    PM_ERR_CONFIG = 10,
    PM_ERR_IO = 11,
    PM_ERR_INTERNAL = 12
} pm_status;

PM_API const char* pm_version(void);
PM_API const char* pm_status_name(pm_status status);
PM_API const char* pm_last_error(void);

/* ---- cost rules and scoring ---- */

typedef struct pm_cost_rules {
    int64_t tp_rate_cents;
    int64_t fp_cost_cents;
    int64_t fn_cost_cents;
    int window_lower;
    int window_upper;
    int horizon;
    int repeats_are_fp; /* nonzero: later in-window alarms cost fp_cost */
} pm_cost_rules;

PM_API void pm_cost_rules_default(pm_cost_rules* rules);

typedef struct pm_failure {
    int64_t at;
    int64_t tp_reward_rate_cents;
    int64_t fn_cost_cents;
    int64_t fp_cost_cents;
    int synthetic;
} pm_failure;

/* Real failure at `at` with the default costs. */
PM_API void pm_failure_default(pm_failure* failure, int64_t at);

typedef struct pm_score {
    int64_t cost_cents;
    size_t n_tp;
    size_t n_fp;
    size_t n_fn;
    size_t n_tp_synthetic;
    size_t n_repeat;
    double mean_dt;
} pm_score;

/* Scores alarm times against failures within [period_begin, period_end). */
PM_API pm_status pm_score_alarms(const int64_t* alarms, size_t n_alarms, const pm_failure* failures,
                                 size_t n_failures, const pm_cost_rules* rules, int64_t period_begin,
                                 int64_t period_end, pm_score* out);

/* Restarting CUSUM on a residual array on the grid start + k*step. Alarm
 * times go to `alarm_times`; when more than `capacity` alarms fire,
 * `n_alarms` receives the full count and PM_ERR_RANGE is returned. */
PM_API pm_status pm_cusum_alarms(const double* residuals, size_t n, int64_t grid_start, int64_t step_seconds,
                                 const int64_t* failure_times, size_t n_failures, double h, int64_t period_begin,
                                 int64_t period_end, int wait_days, int baseline_days, int64_t* alarm_times,
                                 size_t capacity, size_t* n_alarms);

PM_API pm_status pm_random_walk_bound(double sigma, double n, double kappa, double* expected, double* bound,
                                      double* shift_floor);
PM_API double pm_detection_days(double h, double shift, double steps_per_day);
PM_API double pm_minimal_shift(double h, double days_available, double steps_per_day);

typedef struct pm_summary {
    size_t count;
    double mean;
    double stddev;
    double min;
    double max;
    double q1;
    double median;
    double q3;
} pm_summary;

PM_API pm_status pm_summarize(const double* samples, size_t n, pm_summary* out);

/* ---- threshold distribution ---- */

typedef struct pm_distribution pm_distribution;

/* Grid and non-negative weights; the weights are normalised. */
PM_API pm_status pm_distribution_create(const double* h_grid, const double* weights, size_t n,
                                        pm_distribution** out);
/* cost_cents is row-major n_turbines x n_h. */
PM_API pm_status pm_distribution_from_profiles(const double* h_grid, size_t n_h, const int64_t* cost_cents,
                                               size_t n_turbines, int64_t cap_cents, pm_distribution** out);
PM_API pm_status pm_distribution_read(const char* path, pm_distribution** out);
PM_API void pm_distribution_free(pm_distribution* dist);
PM_API size_t pm_distribution_size(const pm_distribution* dist);
PM_API pm_status pm_distribution_mass(const pm_distribution* dist, size_t i, double* h, double* mass);
PM_API pm_status pm_distribution_moments(const pm_distribution* dist, double* mean, double* stddev);
PM_API pm_status pm_distribution_sample(const pm_distribution* dist, uint64_t seed, double* out, size_t n);

/* ---- pipeline ---- */

typedef struct pm_pipeline pm_pipeline;

PM_API pm_status pm_pipeline_open(const char* config_path, pm_pipeline** out);
PM_API void pm_pipeline_close(pm_pipeline* p);
PM_API pm_status pm_pipeline_set_seed(pm_pipeline* p, uint64_t seed);
PM_API pm_status pm_pipeline_set_output(pm_pipeline* p, const char* dir);
PM_API uint64_t pm_pipeline_seed(const pm_pipeline* p);

PM_API pm_status pm_run_frankenstein(pm_pipeline* p);
PM_API pm_status pm_run_fit(pm_pipeline* p);
PM_API pm_status pm_run_scan(pm_pipeline* p);
PM_API pm_status pm_run_residuals(pm_pipeline* p);
PM_API pm_status pm_run_cusum(pm_pipeline* p, const char* period, double h);
PM_API pm_status pm_run_profile(pm_pipeline* p);
PM_API pm_status pm_run_dist(pm_pipeline* p);
PM_API pm_status pm_run_simulate(pm_pipeline* p, const char* period);
/* kind: "reactive", "random" or "maximal"; period may be "all". */
PM_API pm_status pm_run_baseline(pm_pipeline* p, const char* kind, const char* period);
PM_API pm_status pm_run_report(pm_pipeline* p, const char* period);

/* Results of the last successful pm_run_* call; strings live until the
 * next run or close. */
PM_API size_t pm_pipeline_output_count(const pm_pipeline* p);
PM_API const char* pm_pipeline_output(const pm_pipeline* p, size_t i);

typedef struct pm_row {
    const char* policy;
    const char* period;
    pm_summary stats;
    double mean_dt;
    size_t n_tp;
    size_t n_fp;
    size_t n_fn;
} pm_row;

PM_API size_t pm_pipeline_row_count(const pm_pipeline* p);
PM_API pm_status pm_pipeline_row(const pm_pipeline* p, size_t i, pm_row* out);
/* Only after pm_run_dist. */
PM_API pm_status pm_pipeline_moments(const pm_pipeline* p, double* mean, double* stddev);

#ifdef __cplusplus
}
#endif

#endif
