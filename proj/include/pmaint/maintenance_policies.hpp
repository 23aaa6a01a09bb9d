#pragma once

#include "pmaint/cost_model.hpp"

#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pmaint {

/// Every real failure in the period is paid as a false negative.
money reactive_cost(std::span<const failure_event> failures, const time_range& period);

struct savings_bound {
    /// All failures found exactly `horizon` days ahead, no false alarms.
    money full;
    /// Same, with each lead time capped by the days available since the
    /// period start.
    money truncated;
    /// Failures still catchable under the cap, and their mean capped lead time.
    std::size_t truncated_tp = 0;
    double truncated_mean_dt = 0.0;
};

savings_bound maximal_savings(std::span<const failure_event> failures, const time_range& period,
                              const cost_rules& rules = {});

struct inspection_plan {
    std::string turbine;
    std::vector<timestamp> dates;

    std::uint64_t hash() const;
};

/// Counter-based sub-seed for (stream, sample, turbine).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t sample, std::uint64_t turbine);

/// Uniform integer in [0, n) by rejection; n > 0.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// `n_dates` distinct whole days drawn uniformly from `span`, sorted, at
/// midnight offsets from span.begin. Throws range_error when the span has
/// fewer whole days than requested dates.
inspection_plan sample_random_plan(std::mt19937_64& rng, std::size_t n_dates, const time_range& span,
                                   std::string turbine = {});

/// Inspections scored as alarms.
alarm_score score_inspection_plan(const inspection_plan& plan, std::span<const failure_event> failures,
                                  const time_range& period, const cost_rules& rules = {});

struct summary_stats {
    std::size_t count = 0;
    double mean = 0.0;
    /// Population standard deviation.
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Quartiles by linear interpolation between order statistics. Throws
/// data_error on empty input.
summary_stats summarize(std::span<const double> samples);

struct sample_record {
    money cost;
    std::size_t n_tp = 0;
    std::size_t n_fp = 0;
    std::size_t n_fn = 0;
    double mean_dt = 0.0;
    /// Threshold used (model policy) or missing.
    double h = missing;
    /// Inspection plan hash (random policy) or 0.
    std::uint64_t plan_hash = 0;
};

struct cost_distribution {
    std::string label;
    std::uint64_t seed = 0;
    std::vector<sample_record> samples;
    summary_stats stats;

    std::vector<double> costs_in_euros() const;
    /// Sample with the lowest cost (first on ties).
    const sample_record& best() const;
};

struct monte_carlo_result {
    std::vector<cost_distribution> turbines;
    cost_distribution fleet;
    /// pairing[t][s]: which sample of turbine t enters fleet sample s.
    std::vector<std::vector<std::size_t>> pairing;
};

struct turbine_failures {
    std::string turbine;
    std::vector<failure_event> failures;
};

struct random_policy_options {
    std::size_t n_samples = 10000;
    std::size_t n_dates = 12;
    /// Range the inspection dates are drawn from.
    time_range span;
    /// Charge inspections inside a failure's window after the one that found
    /// it. Off by default: a found failure is already being handled.
    bool repeats_are_fp = false;
};

/// Random inspections, `n_dates` per turbine over `span`, scored in
/// `period`. Fleet totals pair turbine samples through a seeded shuffle per
/// turbine, as in monte_carlo_model.
monte_carlo_result monte_carlo_random(std::uint64_t seed, std::span<const turbine_failures> fleet,
                                      const time_range& period, const cost_rules& rules,
                                      const random_policy_options& options);

struct turbine_residuals {
    residual_series residuals;
    std::vector<failure_event> failures;
};

/// Per sample and turbine, draws h from `dist`, runs the CUSUM on that
/// turbine's residuals in `period` and scores it. Fleet totals combine
/// per-turbine samples through an independent seeded shuffle per turbine.
monte_carlo_result monte_carlo_model(std::uint64_t seed, const threshold_distribution& dist,
                                     std::span<const turbine_residuals> fleet, const time_range& period,
                                     const cost_rules& rules, std::size_t n_samples = 10000,
                                     const cusum_options& cusum = {});

/// CSV `sample,turbine,h,plan_hash,cost,n_tp,n_fp,n_fn,mean_dt`, turbines
/// first, then fleet rows.
void write_samples(std::ostream& out, const monte_carlo_result& result);

} // namespace pmaint
