#include "pmaint/change_detection.hpp"

#include "pmaint/csv.hpp"
#include "pmaint/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pmaint {

moving_stats compute_moving_stats(const residual_series& residuals, int window_days, int reference_days) {
    if (window_days <= 0 || reference_days <= 0)
        throw range_error("window lengths must be positive");
    const auto& grid = residuals.grid;
    const auto& r = residuals.values;
    const auto n = r.size();
    moving_stats out;
    out.grid = grid;
    out.window_days = window_days;
    out.mean.assign(n, missing);
    out.stddev.assign(n, missing);

    // shift by the first present value to limit cancellation in the sums
    double shift = 0.0;
    for (double v : r)
        if (!is_missing(v)) {
            shift = v;
            break;
        }
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    std::vector<std::size_t> cnt(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = r[k];
        const bool present = !is_missing(v);
        const double d = present ? v - shift : 0.0;
        s1[k + 1] = s1[k] + d;
        s2[k + 1] = s2[k] + d * d;
        cnt[k + 1] = cnt[k] + (present ? 1 : 0);
    }
    auto window = [&](std::size_t lo, std::size_t hi, double& mean, double& sd) {
        const auto c = cnt[hi] - cnt[lo];
        if (c < 2)
            return false;
        const double m = (s1[hi] - s1[lo]) / static_cast<double>(c);
        const double var = (s2[hi] - s2[lo]) / static_cast<double>(c) - m * m;
        mean = m + shift;
        sd = std::sqrt(std::max(var, 0.0));
        return true;
    };

    const auto w = grid.steps_in(days(window_days));
    for (std::size_t k = 0; k < n; ++k) {
        const auto lo = k + 1 >= w ? k + 1 - w : 0;
        double m, sd;
        if (window(lo, k + 1, m, sd)) {
            out.mean[k] = m;
            out.stddev[k] = sd;
        }
    }
    const auto ref = std::min(grid.steps_in(days(reference_days)), n);
    double m, sd;
    if (window(0, ref, m, sd)) {
        out.reference_mean = m;
        out.reference_std = sd;
    }
    return out;
}

stability_report check_stability(const moving_stats& stats) {
    stability_report rep;
    if (is_missing(stats.reference_mean))
        return rep;
    rep.mean_bound = stats.reference_mean + 3.0 * stats.reference_std;
    rep.spread_low = 0.7 * stats.reference_std;
    rep.spread_high = 2.5 * stats.reference_std;
    // only windows that already span the full length are judged
    const auto w = stats.grid.steps_in(days(stats.window_days));
    for (std::size_t k = w ? w - 1 : 0; k < stats.mean.size(); ++k) {
        if (is_missing(stats.mean[k]))
            continue;
        if (!(std::abs(stats.mean[k]) <= rep.mean_bound)) {
            rep.mean_ok = false;
            rep.mean_violations.push_back(stats.grid.at(k));
        }
        const double sd = stats.stddev[k];
        if (!(rep.spread_low <= sd && sd <= rep.spread_high)) {
            rep.spread_ok = false;
            rep.spread_violations.push_back(stats.grid.at(k));
        }
    }
    return rep;
}

namespace {

// Calibration starting at grid index t0, limited to indices < limit.
bool try_calibrate(std::span<const double> r, const time_grid& grid, std::size_t t0, std::size_t limit, int wait_days,
                   int baseline_days, calibration& out) {
    const auto wait = grid.steps_in(days(wait_days));
    const auto base = grid.steps_in(days(baseline_days));
    const auto b0 = t0 + wait;
    const auto b1 = b0 + base;
    if (b1 > limit)
        return false;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = b0; k < b1; ++k)
        if (!is_missing(r[k])) {
            sum += r[k];
            ++n;
        }
    if (n == 0)
        return false;
    out.ground_level = sum / static_cast<double>(n);
    out.start_index = b1;
    out.start_time = grid.at(b1);
    return true;
}

} // namespace

calibration calibrate(const residual_series& residuals, timestamp t0, int wait_days, int baseline_days) {
    if (wait_days < 0 || baseline_days <= 0)
        throw range_error("calibration windows must be non-negative and baseline positive");
    const auto& grid = residuals.grid;
    if (t0 < grid.start || t0 >= grid.end())
        throw calibration_error("calibration start " + format_timestamp(t0) + " lies outside the residual series");
    calibration c;
    if (!try_calibrate(residuals.values, grid, grid.lower_index(t0), residuals.values.size(), wait_days,
                       baseline_days, c))
        throw calibration_error("not enough residual data after " + format_timestamp(t0) + " to calibrate");
    return c;
}

cusum_result run_cusum(const residual_series& residuals, std::span<const failure_event> failures, double h,
                       const time_range& period, const cusum_options& options) {
    if (!(h > 0.0))
        throw range_error("CUSUM threshold must be positive");
    const auto& grid = residuals.grid;
    const std::span<const double> r = residuals.values;
    const auto k_begin = grid.lower_index(period.begin);
    const auto k_end = grid.lower_index(period.end);

    std::vector<std::size_t> fail_idx;
    for (const auto& f : failures)
        if (!f.synthetic && period.contains(f.at))
            fail_idx.push_back(grid.lower_index(f.at));
    std::sort(fail_idx.begin(), fail_idx.end());
    fail_idx.erase(std::unique(fail_idx.begin(), fail_idx.end()), fail_idx.end());

    cusum_result out;
    std::size_t next_fail = 0;
    auto failure_at_or_before = [&](std::size_t k) {
        return next_fail < fail_idx.size() && fail_idx[next_fail] <= k;
    };

    std::size_t t0 = k_begin;
    while (t0 < k_end) {
        // skip failures at or before the calibration origin
        while (next_fail < fail_idx.size() && fail_idx[next_fail] <= t0)
            ++next_fail;
        const std::size_t limit = next_fail < fail_idx.size() ? std::min(fail_idx[next_fail], k_end) : k_end;
        calibration cal;
        if (!try_calibrate(r, grid, t0, limit, options.wait_days, options.baseline_days, cal)) {
            // a failure interrupted calibration, or the data ran out
            if (next_fail < fail_idx.size() && fail_idx[next_fail] < k_end) {
                t0 = fail_idx[next_fail];
                continue;
            }
            break;
        }

        double ground = cal.ground_level;
        std::size_t k = cal.start_index;
        bool aborted = false;
        while (!aborted && k < k_end) {
            cusum_segment seg;
            seg.id = out.segments.size();
            seg.start_index = k;
            seg.ground_level = ground;
            double c = 0.0;
            std::size_t steps = 0, last_zero = 0;
            bool alarmed = false;
            for (; k < k_end; ++k) {
                if (failure_at_or_before(k)) {
                    aborted = true;
                    break;
                }
                const double e = r[k];
                if (is_missing(e))
                    continue;
                const double prev = c;
                c += e - ground;
                ++steps;
                if (c == 0.0)
                    last_zero = steps;
                else if (prev != 0.0 && std::signbit(prev) != std::signbit(c))
                    last_zero = steps - 1;
                if (options.record_trace) {
                    seg.indices.push_back(k);
                    seg.values.push_back(c);
                }
                if (std::abs(c) >= h) {
                    alarm_event a;
                    a.at = grid.at(k);
                    a.index = k;
                    a.threshold = h;
                    a.sign = c > 0 ? 1 : -1;
                    a.segment = seg.id;
                    a.cusum = c;
                    a.run_length = steps - last_zero;
                    a.ground_before = ground;
                    ground += c / static_cast<double>(a.run_length);
                    a.ground_after = ground;
                    out.alarms.push_back(a);
                    alarmed = true;
                    ++k;
                    break;
                }
            }
            seg.end_index = k;
            seg.cause = alarmed ? segment_end::alarm : (aborted ? segment_end::failure : segment_end::end_of_data);
            out.segments.push_back(std::move(seg));
        }
        if (!aborted)
            break;
        t0 = fail_idx[next_fail];
    }
    return out;
}

void write_cusum_trace(std::ostream& out, const cusum_result& result, const time_grid& grid) {
    csv::write_row(out, {"timestamp", "segment", "cusum", "ground_level"});
    for (const auto& seg : result.segments)
        for (std::size_t i = 0; i < seg.indices.size(); ++i)
            csv::write_row(out, {format_timestamp(grid.at(seg.indices[i])), std::to_string(seg.id),
                                 csv::format_number(seg.values[i]), csv::format_number(seg.ground_level)});
}

random_walk_bounds random_walk_bound(double sigma, double n, double kappa) {
    if (!(sigma > 0.0) || !(n >= 2.0))
        throw range_error("random walk bound needs sigma > 0 and n >= 2");
    const double root = std::sqrt(n);
    return {sigma * root, kappa * sigma * root, kappa * sigma / root};
}

double iterated_log_factor(double n) {
    if (!(n > std::exp(1.0)))
        throw range_error("iterated logarithm needs n > e");
    return std::sqrt(2.0 * std::log(std::log(n)));
}

} // namespace pmaint
