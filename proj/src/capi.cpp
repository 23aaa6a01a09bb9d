#include "pmaint/pmaint.h"

#include "pmaint/errors.hpp"
#include "pmaint/pipeline.hpp"

#include <fstream>
#include <new>
#include <numeric>
#include <string>

struct pm_distribution {
    pmaint::threshold_distribution dist;
};

struct pm_pipeline {
    pmaint::pipeline impl;
    std::vector<std::string> files;
    std::vector<pmaint::report_row> rows;
    std::optional<pmaint::distribution_moments> moments;
};

namespace {

thread_local std::string last_error;

pm_status fail(pm_status s, const char* what) {
    last_error = what;
    return s;
}

// Maps the library's exception hierarchy onto status codes.
template <class F>
pm_status guarded(F&& f) {
    try {
        f();
        return PM_OK;
    } catch (const pmaint::parse_error& e) {
        return fail(PM_ERR_PARSE, e.what());
    } catch (const pmaint::alignment_error& e) {
        return fail(PM_ERR_ALIGNMENT, e.what());
    } catch (const pmaint::reference_error& e) {
        return fail(PM_ERR_REFERENCE, e.what());
    } catch (const pmaint::range_error& e) {
        return fail(PM_ERR_RANGE, e.what());
    } catch (const pmaint::data_error& e) {
        return fail(PM_ERR_DATA, e.what());
    } catch (const pmaint::singular_error& e) {
        return fail(PM_ERR_SINGULAR, e.what());
    } catch (const pmaint::calibration_error& e) {
        return fail(PM_ERR_CALIBRATION, e.what());
    } catch (const pmaint::empty_distribution_error& e) {
        return fail(PM_ERR_EMPTY_DISTRIBUTION, e.what());
    } catch (const pmaint::config_error& e) {
        return fail(PM_ERR_CONFIG, e.what());
    } catch (const pmaint::io_error& e) {
        return fail(PM_ERR_IO, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(PM_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PM_ERR_INTERNAL, "unknown error");
    }
}

#define PM_REQUIRE(cond, msg)                                                                                          \
    do {                                                                                                               \
        if (!(cond))                                                                                                   \
            return fail(PM_ERR_INVALID_ARGUMENT, msg);                                                                 \
    } while (0)

pmaint::timestamp ts(int64_t s) {
    return pmaint::timestamp{pmaint::seconds{s}};
}

pmaint::cost_rules rules_of(const pm_cost_rules* r) {
    pmaint::cost_rules out;
    if (!r)
        return out;
    out.tp_rate = pmaint::money::from_cents(r->tp_rate_cents);
    out.fp_cost = pmaint::money::from_cents(r->fp_cost_cents);
    out.fn_cost = pmaint::money::from_cents(r->fn_cost_cents);
    out.window_lower = r->window_lower;
    out.window_upper = r->window_upper;
    out.horizon = r->horizon;
    out.repeats_are_fp = r->repeats_are_fp != 0;
    return out;
}

void fill_summary(const pmaint::summary_stats& s, pm_summary* out) {
    out->count = s.count;
    out->mean = s.mean;
    out->stddev = s.stddev;
    out->min = s.min;
    out->max = s.max;
    out->q1 = s.q1;
    out->median = s.median;
    out->q3 = s.q3;
}

template <class F>
pm_status run_stage(pm_pipeline* p, F&& f) {
    PM_REQUIRE(p, "pipeline handle is null");
    return guarded([&] {
        pmaint::stage_output o = f(p->impl);
        p->files.clear();
        for (const auto& path : o.files)
            p->files.push_back(path.string());
        p->rows = std::move(o.rows);
        p->moments = o.moments;
    });
}

} // namespace

extern "C" {

const char* pm_version(void) {
    return "1.0.0";
}

const char* pm_status_name(pm_status s) {
    switch (s) {
    case PM_OK: return "ok";
    case PM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PM_ERR_PARSE: return "parse error";
    case PM_ERR_ALIGNMENT: return "alignment error";
    case PM_ERR_REFERENCE: return "reference error";
    case PM_ERR_RANGE: return "range error";
    case PM_ERR_DATA: return "data error";
    case PM_ERR_SINGULAR: return "singular system";
    case PM_ERR_CALIBRATION: return "calibration error";
    case PM_ERR_EMPTY_DISTRIBUTION: return "empty distribution";
    case PM_ERR_CONFIG: return "config error";
    case PM_ERR_IO: return "i/o error";
    case PM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* pm_last_error(void) {
    return last_error.c_str();
}

void pm_cost_rules_default(pm_cost_rules* r) {
    if (!r)
        return;
    const pmaint::cost_rules d;
    r->tp_rate_cents = d.tp_rate.cents();
    r->fp_cost_cents = d.fp_cost.cents();
    r->fn_cost_cents = d.fn_cost.cents();
    r->window_lower = d.window_lower;
    r->window_upper = d.window_upper;
    r->horizon = d.horizon;
    r->repeats_are_fp = d.repeats_are_fp ? 1 : 0;
}

void pm_failure_default(pm_failure* f, int64_t at) {
    if (!f)
        return;
    const pmaint::failure_event d;
    f->at = at;
    f->tp_reward_rate_cents = d.tp_reward_rate.cents();
    f->fn_cost_cents = d.fn_cost.cents();
    f->fp_cost_cents = d.fp_cost.cents();
    f->synthetic = 0;
}

pm_status pm_score_alarms(const int64_t* alarms, size_t n_alarms, const pm_failure* failures, size_t n_failures,
                          const pm_cost_rules* rules, int64_t period_begin, int64_t period_end, pm_score* out) {
    PM_REQUIRE(out, "output is null");
    PM_REQUIRE(alarms || n_alarms == 0, "alarms is null");
    PM_REQUIRE(failures || n_failures == 0, "failures is null");
    PM_REQUIRE(period_begin < period_end, "period is empty");
    return guarded([&] {
        std::vector<pmaint::timestamp> a;
        for (size_t i = 0; i < n_alarms; ++i)
            a.push_back(ts(alarms[i]));
        std::vector<pmaint::failure_event> f(n_failures);
        for (size_t i = 0; i < n_failures; ++i) {
            if (failures[i].tp_reward_rate_cents < 0 || failures[i].fn_cost_cents < 0 || failures[i].fp_cost_cents < 0)
                throw pmaint::range_error("failure costs must be non-negative");
            f[i].at = ts(failures[i].at);
            f[i].tp_reward_rate = pmaint::money::from_cents(failures[i].tp_reward_rate_cents);
            f[i].fn_cost = pmaint::money::from_cents(failures[i].fn_cost_cents);
            f[i].fp_cost = pmaint::money::from_cents(failures[i].fp_cost_cents);
            f[i].synthetic = failures[i].synthetic != 0;
        }
        const auto s = pmaint::score_alarms(a, f, rules_of(rules), {ts(period_begin), ts(period_end)});
        out->cost_cents = s.cost.cents();
        out->n_tp = s.n_tp;
        out->n_fp = s.n_fp;
        out->n_fn = s.n_fn;
        out->n_tp_synthetic = s.n_tp_synthetic;
        out->n_repeat = s.n_repeat;
        out->mean_dt = s.mean_dt;
    });
}

pm_status pm_cusum_alarms(const double* residuals, size_t n, int64_t grid_start, int64_t step_seconds,
                          const int64_t* failure_times, size_t n_failures, double h, int64_t period_begin,
                          int64_t period_end, int wait_days, int baseline_days, int64_t* alarm_times, size_t capacity,
                          size_t* n_alarms) {
    PM_REQUIRE(residuals || n == 0, "residuals is null");
    PM_REQUIRE(failure_times || n_failures == 0, "failure_times is null");
    PM_REQUIRE(alarm_times || capacity == 0, "alarm_times is null");
    PM_REQUIRE(n_alarms, "n_alarms is null");
    PM_REQUIRE(step_seconds > 0, "step must be positive");
    PM_REQUIRE(period_begin < period_end, "period is empty");
    bool overflow = false;
    const auto st = guarded([&] {
        pmaint::residual_series r;
        r.grid = pmaint::time_grid(ts(grid_start), pmaint::seconds{step_seconds}, n);
        r.values.assign(residuals, residuals + n);
        std::vector<pmaint::failure_event> f(n_failures);
        for (size_t i = 0; i < n_failures; ++i)
            f[i].at = ts(failure_times[i]);
        pmaint::cusum_options opt;
        opt.wait_days = wait_days;
        opt.baseline_days = baseline_days;
        const auto res = pmaint::run_cusum(r, f, h, {ts(period_begin), ts(period_end)}, opt);
        *n_alarms = res.alarms.size();
        for (size_t i = 0; i < res.alarms.size() && i < capacity; ++i)
            alarm_times[i] = res.alarms[i].at.time_since_epoch().count();
        overflow = res.alarms.size() > capacity;
    });
    if (st == PM_OK && overflow)
        return fail(PM_ERR_RANGE, "alarm buffer too small");
    return st;
}

pm_status pm_random_walk_bound(double sigma, double n, double kappa, double* expected, double* bound,
                               double* shift_floor) {
    return guarded([&] {
        const auto b = pmaint::random_walk_bound(sigma, n, kappa);
        if (expected)
            *expected = b.expected;
        if (bound)
            *bound = b.bound;
        if (shift_floor)
            *shift_floor = b.mean_shift_floor;
    });
}

double pm_detection_days(double h, double shift, double steps_per_day) {
    return pmaint::detection_days(h, shift, steps_per_day);
}

double pm_minimal_shift(double h, double days_available, double steps_per_day) {
    return pmaint::minimal_shift(h, days_available, steps_per_day);
}

pm_status pm_summarize(const double* samples, size_t n, pm_summary* out) {
    PM_REQUIRE(out, "output is null");
    PM_REQUIRE(samples || n == 0, "samples is null");
    return guarded([&] { fill_summary(pmaint::summarize({samples, n}), out); });
}

pm_status pm_distribution_create(const double* h_grid, const double* weights, size_t n, pm_distribution** out) {
    PM_REQUIRE(out, "output is null");
    PM_REQUIRE((h_grid && weights) || n == 0, "input is null");
    return guarded([&] {
        pmaint::threshold_distribution d;
        d.h_grid.assign(h_grid, h_grid + n);
        d.mass.assign(weights, weights + n);
        double total = 0.0;
        for (const double w : d.mass) {
            if (!(w >= 0.0))
                throw pmaint::range_error("weights must be non-negative");
            total += w;
        }
        if (!(total > 0.0))
            throw pmaint::empty_distribution_error("weights sum to zero");
        for (auto& w : d.mass)
            w /= total;
        *out = new pm_distribution{std::move(d)};
    });
}

pm_status pm_distribution_from_profiles(const double* h_grid, size_t n_h, const int64_t* cost_cents,
                                        size_t n_turbines, int64_t cap_cents, pm_distribution** out) {
    PM_REQUIRE(out, "output is null");
    PM_REQUIRE((h_grid && cost_cents) || n_h * n_turbines == 0, "input is null");
    return guarded([&] {
        std::vector<pmaint::cost_profile> profiles(n_turbines);
        for (size_t t = 0; t < n_turbines; ++t) {
            profiles[t].turbine = "T" + std::to_string(t);
            profiles[t].h_grid.assign(h_grid, h_grid + n_h);
            for (size_t i = 0; i < n_h; ++i)
                profiles[t].cost.push_back(pmaint::money::from_cents(cost_cents[t * n_h + i]));
        }
        *out = new pm_distribution{pmaint::build_threshold_distribution(profiles, pmaint::money::from_cents(cap_cents))};
    });
}

pm_status pm_distribution_read(const char* path, pm_distribution** out) {
    PM_REQUIRE(path && out, "argument is null");
    return guarded([&] {
        std::ifstream in(path);
        if (!in)
            throw pmaint::io_error(std::string("cannot open '") + path + "'");
        *out = new pm_distribution{pmaint::read_distribution(in)};
    });
}

void pm_distribution_free(pm_distribution* d) {
    delete d;
}

size_t pm_distribution_size(const pm_distribution* d) {
    return d ? d->dist.h_grid.size() : 0;
}

pm_status pm_distribution_mass(const pm_distribution* d, size_t i, double* h, double* mass) {
    PM_REQUIRE(d, "distribution is null");
    if (i >= d->dist.h_grid.size())
        return fail(PM_ERR_RANGE, "index out of range");
    if (h)
        *h = d->dist.h_grid[i];
    if (mass)
        *mass = d->dist.mass[i];
    return PM_OK;
}

pm_status pm_distribution_moments(const pm_distribution* d, double* mean, double* stddev) {
    PM_REQUIRE(d, "distribution is null");
    return guarded([&] {
        const auto m = pmaint::moments_of(d->dist);
        if (mean)
            *mean = m.mean;
        if (stddev)
            *stddev = m.stddev;
    });
}

pm_status pm_distribution_sample(const pm_distribution* d, uint64_t seed, double* out, size_t n) {
    PM_REQUIRE(d, "distribution is null");
    PM_REQUIRE(out || n == 0, "output is null");
    return guarded([&] {
        std::mt19937_64 rng(seed);
        for (size_t i = 0; i < n; ++i)
            out[i] = d->dist.sample(rng);
    });
}

pm_status pm_pipeline_open(const char* config_path, pm_pipeline** out) {
    PM_REQUIRE(config_path && out, "argument is null");
    *out = nullptr;
    return guarded([&] { *out = new pm_pipeline{pmaint::pipeline(pmaint::load_config(config_path)), {}, {}, {}}; });
}

void pm_pipeline_close(pm_pipeline* p) {
    delete p;
}

pm_status pm_pipeline_set_seed(pm_pipeline* p, uint64_t seed) {
    PM_REQUIRE(p, "pipeline handle is null");
    p->impl.set_seed(seed);
    return PM_OK;
}

pm_status pm_pipeline_set_output(pm_pipeline* p, const char* dir) {
    PM_REQUIRE(p && dir && *dir, "argument is null or empty");
    p->impl.set_output(dir);
    return PM_OK;
}

uint64_t pm_pipeline_seed(const pm_pipeline* p) {
    return p ? p->impl.config().seed : 0;
}

pm_status pm_run_frankenstein(pm_pipeline* p) {
    return run_stage(p, [](pmaint::pipeline& q) { return q.run_frankenstein(); });
}

pm_status pm_run_fit(pm_pipeline* p) {
    return run_stage(p, [](pmaint::pipeline& q) { return q.run_fit(); });
}

pm_status pm_run_scan(pm_pipeline* p) {
    return run_stage(p, [](pmaint::pipeline& q) { return q.run_scan(); });
}

pm_status pm_run_residuals(pm_pipeline* p) {
    return run_stage(p, [](pmaint::pipeline& q) { return q.run_residuals(); });
}

pm_status pm_run_cusum(pm_pipeline* p, const char* period, double h) {
    PM_REQUIRE(period, "period is null");
    return run_stage(p, [&](pmaint::pipeline& q) { return q.run_cusum(period, h); });
}

pm_status pm_run_profile(pm_pipeline* p) {
    return run_stage(p, [](pmaint::pipeline& q) { return q.run_profile(); });
}

pm_status pm_run_dist(pm_pipeline* p) {
    return run_stage(p, [](pmaint::pipeline& q) { return q.run_dist(); });
}

pm_status pm_run_simulate(pm_pipeline* p, const char* period) {
    PM_REQUIRE(period, "period is null");
    return run_stage(p, [&](pmaint::pipeline& q) { return q.run_simulate(period); });
}

pm_status pm_run_baseline(pm_pipeline* p, const char* kind, const char* period) {
    PM_REQUIRE(kind && period, "argument is null");
    return run_stage(p, [&](pmaint::pipeline& q) { return q.run_baseline(kind, period); });
}

pm_status pm_run_report(pm_pipeline* p, const char* period) {
    PM_REQUIRE(period, "period is null");
    return run_stage(p, [&](pmaint::pipeline& q) { return q.run_report(period); });
}

size_t pm_pipeline_output_count(const pm_pipeline* p) {
    return p ? p->files.size() : 0;
}

const char* pm_pipeline_output(const pm_pipeline* p, size_t i) {
    return p && i < p->files.size() ? p->files[i].c_str() : nullptr;
}

size_t pm_pipeline_row_count(const pm_pipeline* p) {
    return p ? p->rows.size() : 0;
}

pm_status pm_pipeline_row(const pm_pipeline* p, size_t i, pm_row* out) {
    PM_REQUIRE(p && out, "argument is null");
    if (i >= p->rows.size())
        return fail(PM_ERR_RANGE, "row index out of range");
    const auto& r = p->rows[i];
    out->policy = r.policy.c_str();
    out->period = r.period.c_str();
    fill_summary(r.stats, &out->stats);
    out->mean_dt = r.mean_dt;
    out->n_tp = r.n_tp;
    out->n_fp = r.n_fp;
    out->n_fn = r.n_fn;
    return PM_OK;
}

pm_status pm_pipeline_moments(const pm_pipeline* p, double* mean, double* stddev) {
    PM_REQUIRE(p, "pipeline handle is null");
    if (!p->moments)
        return fail(PM_ERR_INVALID_ARGUMENT, "no distribution computed by the last run");
    if (mean)
        *mean = p->moments->mean;
    if (stddev)
        *stddev = p->moments->stddev;
    return PM_OK;
}

} // extern "C"
