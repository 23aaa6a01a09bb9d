#pragma once

#include "pmaint/change_detection.hpp"
#include "pmaint/money.hpp"
#include "pmaint/scada_ingest.hpp"

#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pmaint {

/// Operator cost rules. An alarm `dt` whole days before a failure is a true
/// positive when window_lower < dt <= window_upper and earns
/// tp_rate * dt / horizon.
struct cost_rules {
    money tp_rate = money::from_euros(17000);
    money fp_cost = money::from_euros(2000);
    money fn_cost = money::from_euros(20000);
    int window_lower = 2;
    int window_upper = 60;
    int horizon = 60;
    /// Whether in-window alarms after a failure's TP are charged as false
    /// positives. Alarms keep this on; random inspections turn it off.
    bool repeats_are_fp = true;

    /// Throws range_error unless 0 < lower < upper <= horizon.
    void validate() const;
};

struct alarm_score {
    /// Loss-positive total.
    money cost;
    std::size_t n_tp = 0;
    std::size_t n_fp = 0;
    std::size_t n_fn = 0;
    /// In-window first alarms before synthetic failures (no reward, no fee).
    std::size_t n_tp_synthetic = 0;
    /// In-window repeats left uncharged because repeats_are_fp is off.
    std::size_t n_repeat = 0;
    /// Mean lead time of real true positives in days; 0 when there are none.
    double mean_dt = 0.0;
    money tp_savings;
    money fp_total;
    money fn_total;
};

/// Classifies alarms against failures inside `period`.
///
/// Each alarm belongs to the earliest failure at or after it; its lead time
/// is floor((t_fail - t_alarm) / 1 day). The earliest in-window alarm of a
/// failure is its TP, every other alarm is an FP (charged at the owning
/// failure's fp_cost, or the rule default when no failure follows), and a
/// real failure without TP is an FN. Real failures count when inside
/// [begin, end); synthetic ones also at exactly `end`.
alarm_score score_alarms(std::span<const timestamp> alarms, std::span<const failure_event> failures,
                         const cost_rules& rules, const time_range& period);

struct cost_profile {
    std::string turbine;
    std::vector<double> h_grid;
    std::vector<money> cost;
};

/// Default threshold grid: 100, 200, ..., 150000.
std::vector<double> default_h_grid(double h_min = 100.0, double h_max = 150000.0, double h_step = 100.0);

/// Cost of running the CUSUM at each threshold and scoring its alarms.
cost_profile compute_cost_profile(const residual_series& residuals, std::span<const failure_event> failures,
                                  const cost_rules& rules, const time_range& period, std::span<const double> h_grid,
                                  const cusum_options& cusum = {});

/// Score of one threshold, shared by profiles and Monte Carlo runs.
alarm_score score_threshold(const residual_series& residuals, std::span<const failure_event> failures,
                            const cost_rules& rules, const time_range& period, double h,
                            const cusum_options& cusum = {});

struct threshold_distribution {
    std::vector<double> h_grid;
    std::vector<double> mass;
    /// Turbines whose acceptance set is non-empty.
    std::vector<std::string> contributors;

    /// Draws a grid value with probability `mass`.
    double sample(std::mt19937_64& rng) const;
    /// Index form of sample().
    std::size_t sample_index(std::mt19937_64& rng) const;
};

/// Per turbine, f(h) = max(0, cap - cost(h)) normalised to unit mass;
/// turbines with no positive f are left out. The result is the
/// renormalised sum. Throws empty_distribution_error if nothing contributes
/// and reference_error if the profiles disagree on the grid.
threshold_distribution build_threshold_distribution(std::span<const cost_profile> profiles,
                                                    money cap = money::from_euros(20000));

struct distribution_moments {
    double mean = 0.0;
    double stddev = 0.0;
};

distribution_moments moments_of(const threshold_distribution& dist);

/// Days for a sustained shift of `shift` per step to accumulate `h` at
/// `steps_per_day` steps a day.
double detection_days(double h, double shift, double steps_per_day = 144.0);
/// Smallest sustained shift that accumulates `h` within `days_available`.
double minimal_shift(double h, double days_available = 60.0, double steps_per_day = 144.0);

/// CSV `h,value`.
void write_profile(std::ostream& out, const cost_profile& profile);
void write_distribution(std::ostream& out, const threshold_distribution& dist);
threshold_distribution read_distribution(std::istream& in);

} // namespace pmaint
