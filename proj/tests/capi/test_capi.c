/* Exercises the shared library through its C header only. */
#include "pmaint/pmaint.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                                                                   \
    do {                                                                                                               \
        if (!(cond)) {                                                                                                 \
            fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, __LINE__, #cond, pm_last_error());     \
            ++failures;                                                                                                \
        }                                                                                                              \
    } while (0)

static const int64_t day = 86400;
/* 2016-06-01T12:00:00Z */
static const int64_t F = 1464782400;

static void test_basics(void) {
    EXPECT(strlen(pm_version()) > 0);
    EXPECT(strcmp(pm_status_name(PM_OK), "ok") == 0);
    EXPECT(strcmp(pm_status_name(PM_ERR_CONFIG), "config error") == 0);
    EXPECT(pm_summarize(NULL, 3, NULL) == PM_ERR_INVALID_ARGUMENT);
    EXPECT(strlen(pm_last_error()) > 0);
}

static void test_scoring(void) {
    pm_cost_rules rules;
    pm_failure f;
    pm_score s;
    int64_t alarms[3] = {F - 61 * day, F - 42 * day, F - 1 * day};
    pm_cost_rules_default(&rules);
    EXPECT(rules.tp_rate_cents == 1700000 && rules.fp_cost_cents == 200000 && rules.fn_cost_cents == 2000000);
    EXPECT(rules.window_lower == 2 && rules.window_upper == 60 && rules.horizon == 60);
    pm_failure_default(&f, F);
    EXPECT(pm_score_alarms(alarms, 3, &f, 1, &rules, F - 100 * day, F + day, &s) == PM_OK);
    EXPECT(s.cost_cents == -790000);
    EXPECT(s.n_tp == 1 && s.n_fp == 2 && s.n_fn == 0);
    alarms[1] = F - 13 * day;
    EXPECT(pm_score_alarms(alarms, 3, &f, 1, &rules, F - 100 * day, F + day, &s) == PM_OK);
    EXPECT(s.cost_cents == 31667);
    EXPECT(pm_score_alarms(NULL, 0, &f, 1, NULL, F - 100 * day, F + day, &s) == PM_OK);
    EXPECT(s.cost_cents == 2000000 && s.n_fn == 1);
    rules.window_lower = 70;
    EXPECT(pm_score_alarms(NULL, 0, &f, 1, &rules, F - 100 * day, F + day, &s) == PM_ERR_RANGE);
}

static void test_cusum(void) {
    /* flat for 4 days, then +1 per step: first alarm 144 steps into the shift */
    enum { n = 144 * 12 };
    static double r[n];
    int64_t times[64];
    size_t count = 0;
    const int64_t start = F - 30 * day;
    for (size_t k = 0; k < n; ++k)
        r[k] = k < 144 * 4 ? 0.0 : 1.0;
    EXPECT(pm_cusum_alarms(r, n, start, 600, NULL, 0, 144.0, start, start + n * 600, 2, 2, times, 64, &count) ==
           PM_OK);
    EXPECT(count == 1);
    EXPECT(count >= 1 && times[0] == start + (144 * 4 + 143) * 600);
    /* a noisy alternating tail trips a tiny threshold more often than the buffer holds */
    for (size_t k = 144 * 4; k < n; ++k)
        r[k] = (k % 2) ? 3.0 : -3.0;
    EXPECT(pm_cusum_alarms(r, n, start, 600, NULL, 0, 1.0, start, start + n * 600, 2, 2, times, 4, &count) ==
           PM_ERR_RANGE);
    EXPECT(count > 4);
    EXPECT(pm_cusum_alarms(r, n, start, 600, NULL, 0, -1.0, start, start + n * 600, 2, 2, times, 4, &count) ==
           PM_ERR_RANGE);
}

static void test_numerics(void) {
    double e, b, fl;
    pm_summary s;
    const double xs[3] = {3.0, 1.0, 2.0};
    EXPECT(pm_random_walk_bound(1.0, 144.0, 2.0, &e, &b, &fl) == PM_OK);
    EXPECT(fabs(e - 12.0) < 1e-12 && fabs(b - 24.0) < 1e-12);
    EXPECT(pm_random_walk_bound(3.0, 900.0, 2.0, &e, &b, &fl) == PM_OK);
    EXPECT(fabs(fl - 0.2) < 1e-12);
    EXPECT(fabs(pm_detection_days(19400.0, 10.0, 144.0) - 13.4722) < 1e-4);
    EXPECT(fabs(pm_minimal_shift(19400.0, 60.0, 144.0) - 2.2454) < 1e-4);
    EXPECT(pm_summarize(xs, 3, &s) == PM_OK);
    EXPECT(s.count == 3 && s.mean == 2.0 && s.min == 1.0 && s.median == 2.0);
    EXPECT(pm_summarize(xs, 0, &s) != PM_OK);
}

static void test_distribution(void) {
    const double grid[2] = {10000.0, 20000.0};
    const double w[2] = {1.0, 1.0};
    const int64_t costs[4] = {-1700000, 3000000, 3000000, 0}; /* two turbines, one accepted h each */
    pm_distribution* d = NULL;
    double mean, sd, h, m;
    double a[100], b[100];
    EXPECT(pm_distribution_create(grid, w, 2, &d) == PM_OK);
    EXPECT(pm_distribution_size(d) == 2);
    EXPECT(pm_distribution_moments(d, &mean, &sd) == PM_OK);
    EXPECT(fabs(mean - 15000.0) < 1e-9 && fabs(sd - 5000.0) < 1e-9);
    EXPECT(pm_distribution_sample(d, 42, a, 100) == PM_OK);
    EXPECT(pm_distribution_sample(d, 42, b, 100) == PM_OK);
    EXPECT(memcmp(a, b, sizeof a) == 0);
    EXPECT(pm_distribution_mass(d, 5, &h, &m) == PM_ERR_RANGE);
    pm_distribution_free(d);

    d = NULL;
    EXPECT(pm_distribution_from_profiles(grid, 2, costs, 2, 2000000, &d) == PM_OK);
    EXPECT(pm_distribution_mass(d, 0, &h, &m) == PM_OK);
    EXPECT(h == 10000.0 && fabs(m - 0.5) < 1e-12);
    pm_distribution_free(d);

    const int64_t bad[2] = {2000000, 5000000};
    d = NULL;
    EXPECT(pm_distribution_from_profiles(grid, 2, bad, 1, 2000000, &d) == PM_ERR_EMPTY_DISTRIBUTION);
    EXPECT(d == NULL);
    EXPECT(pm_distribution_read("/nonexistent/dist.csv", &d) == PM_ERR_IO);
    pm_distribution_free(NULL);
}

static void test_pipeline(const char* config, const char* out) {
    pm_pipeline* p = NULL;
    pm_row row;
    double mean, sd;
    EXPECT(pm_pipeline_open("/nonexistent/config.json", &p) == PM_ERR_CONFIG);
    EXPECT(p == NULL);
    EXPECT(pm_pipeline_open(config, &p) == PM_OK);
    if (!p)
        return;
    EXPECT(pm_pipeline_set_output(p, out) == PM_OK);
    EXPECT(pm_pipeline_set_seed(p, 11) == PM_OK);
    EXPECT(pm_pipeline_seed(p) == 11);

    EXPECT(pm_pipeline_moments(p, &mean, &sd) == PM_ERR_INVALID_ARGUMENT);
    EXPECT(pm_run_baseline(p, "reactive", "all") == PM_OK);
    EXPECT(pm_pipeline_row_count(p) == 4);
    EXPECT(pm_pipeline_row(p, 0, &row) == PM_OK);
    EXPECT(strcmp(row.policy, "reactive") == 0 && strcmp(row.period, "train") == 0);
    EXPECT(row.stats.mean == 40000.0 && row.n_fn == 2);
    EXPECT(pm_pipeline_row(p, 4, &row) == PM_ERR_RANGE);
    EXPECT(pm_run_baseline(p, "psychic", "train") == PM_ERR_CONFIG);
    EXPECT(pm_run_cusum(p, "winter", 100.0) == PM_ERR_RANGE);

    EXPECT(pm_run_dist(p) == PM_OK);
    EXPECT(pm_pipeline_output_count(p) == 2);
    EXPECT(pm_pipeline_moments(p, &mean, &sd) == PM_OK);
    EXPECT(mean > 0.0 && sd >= 0.0);
    EXPECT(pm_pipeline_output(p, 99) == NULL);

    EXPECT(pm_run_simulate(p, "test2") == PM_OK);
    EXPECT(pm_pipeline_row_count(p) == 1);
    EXPECT(pm_pipeline_row(p, 0, &row) == PM_OK);
    EXPECT(strcmp(row.policy, "model") == 0 && row.stats.count > 0);
    pm_pipeline_close(p);
    pm_pipeline_close(NULL);
}

int main(int argc, char** argv) {
    test_basics();
    test_scoring();
    test_cusum();
    test_numerics();
    test_distribution();
    if (argc >= 3)
        test_pipeline(argv[1], argv[2]);
    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("all C API checks passed\n");
    return 0;
}
