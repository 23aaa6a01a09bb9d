#include "pmaint/cost_model.hpp"

#include "pmaint/csv.hpp"
#include "pmaint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>

namespace pmaint {

void cost_rules::validate() const {
    if (!(0 < window_lower && window_lower < window_upper && window_upper <= horizon))
        throw range_error("cost rules need 0 < window_lower < window_upper <= horizon");
    if (tp_rate < money{} || fp_cost < money{} || fn_cost < money{})
        throw range_error("cost rule amounts must be non-negative");
}

alarm_score score_alarms(std::span<const timestamp> alarms, std::span<const failure_event> failures,
                         const cost_rules& rules, const time_range& period) {
    rules.validate();
    std::vector<const failure_event*> fails;
    for (const auto& f : failures) {
        const bool inside = f.synthetic ? (period.begin <= f.at && f.at <= period.end) : period.contains(f.at);
        if (inside)
            fails.push_back(&f);
    }
    std::stable_sort(fails.begin(), fails.end(),
                     [](const failure_event* a, const failure_event* b) { return a->at < b->at; });

    std::vector<timestamp> sorted;
    for (const auto a : alarms)
        if (period.contains(a))
            sorted.push_back(a);
    std::sort(sorted.begin(), sorted.end());

    alarm_score score;
    std::vector<char> found(fails.size(), 0);
    std::int64_t dt_sum = 0;
    for (const auto a : sorted) {
        const auto it = std::lower_bound(fails.begin(), fails.end(), a,
                                         [](const failure_event* f, timestamp t) { return f->at < t; });
        if (it == fails.end()) {
            ++score.n_fp;
            score.fp_total += rules.fp_cost;
            continue;
        }
        const auto i = static_cast<std::size_t>(it - fails.begin());
        const auto& f = **it;
        const auto dt = floor_days(a, f.at);
        if (!found[i] && rules.window_lower < dt && dt <= rules.window_upper) {
            found[i] = 1;
            if (f.synthetic) {
                ++score.n_tp_synthetic;
            } else {
                ++score.n_tp;
                dt_sum += dt;
                score.tp_savings += f.tp_reward_rate.scaled(dt, rules.horizon);
            }
        } else if (found[i] && !rules.repeats_are_fp && rules.window_lower < dt && dt <= rules.window_upper) {
            ++score.n_repeat;
        } else {
            ++score.n_fp;
            score.fp_total += f.fp_cost;
        }
    }
    for (std::size_t i = 0; i < fails.size(); ++i)
        if (!found[i] && !fails[i]->synthetic) {
            ++score.n_fn;
            score.fn_total += fails[i]->fn_cost;
        }
    score.mean_dt = score.n_tp ? static_cast<double>(dt_sum) / static_cast<double>(score.n_tp) : 0.0;
    score.cost = score.fp_total + score.fn_total - score.tp_savings;
    return score;
}

std::vector<double> default_h_grid(double h_min, double h_max, double h_step) {
    if (!(h_min > 0.0 && h_step > 0.0 && h_max >= h_min))
        throw range_error("threshold grid needs 0 < h_min <= h_max and a positive step");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((h_max - h_min) / h_step + 1e-9)) + 1;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        grid.push_back(h_min + h_step * static_cast<double>(i));
    return grid;
}

alarm_score score_threshold(const residual_series& residuals, std::span<const failure_event> failures,
                            const cost_rules& rules, const time_range& period, double h, const cusum_options& cusum) {
    cusum_options opt = cusum;
    opt.record_trace = false;
    const auto run = run_cusum(residuals, failures, h, period, opt);
    std::vector<timestamp> times;
    times.reserve(run.alarms.size());
    for (const auto& a : run.alarms)
        times.push_back(a.at);
    return score_alarms(times, failures, rules, period);
}

cost_profile compute_cost_profile(const residual_series& residuals, std::span<const failure_event> failures,
                                  const cost_rules& rules, const time_range& period, std::span<const double> h_grid,
                                  const cusum_options& cusum) {
    for (std::size_t i = 0; i < h_grid.size(); ++i)
        if (!(h_grid[i] > 0.0) || (i && !(h_grid[i] > h_grid[i - 1])))
            throw range_error("threshold grid must be positive and strictly ascending");
    cost_profile p;
    p.turbine = residuals.turbine;
    p.h_grid.assign(h_grid.begin(), h_grid.end());
    p.cost.reserve(h_grid.size());
    for (const double h : h_grid)
        p.cost.push_back(score_threshold(residuals, failures, rules, period, h, cusum).cost);
    return p;
}

std::size_t threshold_distribution::sample_index(std::mt19937_64& rng) const {
    if (mass.empty())
        throw empty_distribution_error("cannot sample an empty threshold distribution");
    // 53 random bits -> [0, 1)
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] <= 0.0)
            continue;
        last_positive = i;
        acc += mass[i];
        if (u < acc)
            return i;
    }
    return last_positive;
}

double threshold_distribution::sample(std::mt19937_64& rng) const {
    return h_grid[sample_index(rng)];
}

threshold_distribution build_threshold_distribution(std::span<const cost_profile> profiles, money cap) {
    if (!(cap > money{}))
        throw range_error("cap must be positive");
    if (profiles.empty())
        throw empty_distribution_error("no cost profiles given");
    threshold_distribution dist;
    dist.h_grid = profiles.front().h_grid;
    dist.mass.assign(dist.h_grid.size(), 0.0);
    std::vector<double> f(dist.h_grid.size());
    for (const auto& p : profiles) {
        if (p.h_grid != dist.h_grid || p.cost.size() != p.h_grid.size())
            throw reference_error("cost profiles do not share one threshold grid");
        double total = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = static_cast<double>(std::max<std::int64_t>(0, (cap - p.cost[i]).cents()));
            total += f[i];
        }
        if (total <= 0.0)
            continue;
        for (std::size_t i = 0; i < f.size(); ++i)
            dist.mass[i] += f[i] / total;
        dist.contributors.push_back(p.turbine);
    }
    if (dist.contributors.empty())
        throw empty_distribution_error("no turbine has a threshold cheaper than the cap");
    const double sum = std::accumulate(dist.mass.begin(), dist.mass.end(), 0.0);
    for (auto& m : dist.mass)
        m /= sum;
    return dist;
}

distribution_moments moments_of(const threshold_distribution& dist) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < dist.h_grid.size(); ++i) {
        m1 += dist.h_grid[i] * dist.mass[i];
        m2 += dist.h_grid[i] * dist.h_grid[i] * dist.mass[i];
    }
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

double detection_days(double h, double shift, double steps_per_day) {
    return h / (steps_per_day * shift);
}

double minimal_shift(double h, double days_available, double steps_per_day) {
    return h / (steps_per_day * days_available);
}

void write_profile(std::ostream& out, const cost_profile& profile) {
    csv::write_row(out, {"h", "cost"});
    for (std::size_t i = 0; i < profile.h_grid.size(); ++i)
        csv::write_row(out, {csv::format_number(profile.h_grid[i]), csv::format_number(profile.cost[i].euros())});
}

void write_distribution(std::ostream& out, const threshold_distribution& dist) {
    csv::write_row(out, {"h", "probability"});
    for (std::size_t i = 0; i < dist.h_grid.size(); ++i)
        csv::write_row(out, {csv::format_number(dist.h_grid[i]), csv::format_number(dist.mass[i])});
}

threshold_distribution read_distribution(std::istream& in) {
    csv::reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row) || row.size() != 2)
        throw parse_error("distribution CSV needs an 'h,probability' header");
    threshold_distribution dist;
    while (reader.next(row)) {
        if (row.size() != 2)
            throw parse_error("expected 2 fields", reader.line());
        const auto h = csv::parse_number(row[0]);
        const auto p = csv::parse_number(row[1]);
        if (!h || !p || *p < 0.0)
            throw parse_error("bad distribution row", reader.line());
        dist.h_grid.push_back(*h);
        dist.mass.push_back(*p);
    }
    if (dist.mass.empty() || std::accumulate(dist.mass.begin(), dist.mass.end(), 0.0) <= 0.0)
        throw empty_distribution_error("distribution CSV holds no probability mass");
    return dist;
}

} // namespace pmaint
