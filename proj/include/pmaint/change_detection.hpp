#pragma once

#include "pmaint/nbm_regression.hpp"
#include "pmaint/scada_ingest.hpp"

#include <ostream>
#include <span>
#include <vector>

namespace pmaint {

/// Trailing-window residual mean and spread, plus reference values from the
/// first days of the series.
struct moving_stats {
    time_grid grid;
    int window_days = 30;
    /// Per grid index; `missing` where the window holds < 2 present residuals.
    std::vector<double> mean;
    std::vector<double> stddev;
    double reference_mean = missing;
    double reference_std = missing;
};

/// Window at index k covers grid points (k - window, k]. Population std.
moving_stats compute_moving_stats(const residual_series& residuals, int window_days = 30, int reference_days = 3);

struct stability_report {
    /// Checked only where the trailing window spans its full length.
    /// |mean(t)| <= reference_mean + 3 reference_std.
    bool mean_ok = true;
    /// 0.7 reference_std <= std(t) <= 2.5 reference_std.
    bool spread_ok = true;
    double mean_bound = 0.0;
    double spread_low = 0.0;
    double spread_high = 0.0;
    std::vector<timestamp> mean_violations;
    std::vector<timestamp> spread_violations;
};

stability_report check_stability(const moving_stats& stats);

struct calibration {
    double ground_level = 0.0;
    /// First grid index that accumulates.
    std::size_t start_index = 0;
    timestamp start_time{};
};

/// Ground level is the mean of present residuals in
/// [t0 + wait, t0 + wait + baseline); accumulation starts at
/// t0 + wait + baseline. Throws calibration_error when the series ends
/// before that or the baseline window has no present residual.
calibration calibrate(const residual_series& residuals, timestamp t0, int wait_days = 2, int baseline_days = 2);

enum class segment_end { failure, alarm, end_of_data };

struct cusum_segment {
    std::size_t id = 0;
    std::size_t start_index = 0;
    /// One past the last grid index belonging to the segment.
    std::size_t end_index = 0;
    double ground_level = 0.0;
    segment_end cause = segment_end::end_of_data;
    /// Only filled when tracing: grid index and cumulative sum per
    /// accumulated (present) residual.
    std::vector<std::size_t> indices;
    std::vector<double> values;
};

struct alarm_event {
    timestamp at{};
    std::size_t index = 0;
    double threshold = 0.0;
    /// +1 for an upward crossing, -1 for a downward one.
    int sign = 0;
    std::size_t segment = 0;
    /// Signed cumulative sum at the alarm.
    double cusum = 0.0;
    double ground_before = 0.0;
    double ground_after = 0.0;
    /// Accumulated steps since the last zero crossing.
    std::size_t run_length = 0;
};

struct cusum_options {
    int wait_days = 2;
    int baseline_days = 2;
    bool record_trace = false;
};

struct cusum_result {
    std::vector<cusum_segment> segments;
    std::vector<alarm_event> alarms;
};

/// Two-sided restarting CUSUM over `period`.
///
/// Calibrates at the period start and after every real failure inside the
/// period (synthetic failures are ignored here). Within a segment
/// C += residual - ground; an alarm fires when |C| >= h, after which the
/// ground level moves by C / (steps since the last zero crossing) and
/// accumulation restarts immediately from zero. A failure aborts the running
/// segment before the residual at its grid point is used. Missing residuals
/// neither contribute nor count as steps.
cusum_result run_cusum(const residual_series& residuals, std::span<const failure_event> failures, double h,
                       const time_range& period, const cusum_options& options = {});

/// CSV `timestamp,segment,cusum,ground_level`; needs a traced result.
void write_cusum_trace(std::ostream& out, const cusum_result& result, const time_grid& grid);

struct random_walk_bounds {
    /// sigma * sqrt(n): RMS distance after n steps.
    double expected = 0.0;
    /// kappa * sigma * sqrt(n)
    double bound = 0.0;
    /// kappa * sigma / sqrt(n): smallest mean shift distinguishable from noise.
    double mean_shift_floor = 0.0;
};

random_walk_bounds random_walk_bound(double sigma, double n, double kappa = 2.0);

/// sqrt(2 log log n), the iterated-logarithm envelope factor.
double iterated_log_factor(double n);

} // namespace pmaint
