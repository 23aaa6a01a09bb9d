#include "pmaint/maintenance_policies.hpp"

#include "pmaint/csv.hpp"
#include "pmaint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

namespace pmaint {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

bool real_in(const failure_event& f, const time_range& period) {
    return !f.synthetic && period.contains(f.at);
}

void finish(cost_distribution& d) {
    d.stats = summarize(d.costs_in_euros());
}

} // namespace

money reactive_cost(std::span<const failure_event> failures, const time_range& period) {
    money total;
    for (const auto& f : failures)
        if (real_in(f, period))
            total += f.fn_cost;
    return total;
}

savings_bound maximal_savings(std::span<const failure_event> failures, const time_range& period,
                              const cost_rules& rules) {
    rules.validate();
    savings_bound out;
    std::int64_t dt_sum = 0;
    for (const auto& f : failures) {
        if (!real_in(f, period))
            continue;
        out.full -= f.tp_reward_rate.scaled(rules.window_upper, rules.horizon);
        const auto available = std::min<std::int64_t>(floor_days(period.begin, f.at), rules.window_upper);
        if (available > rules.window_lower) {
            out.truncated -= f.tp_reward_rate.scaled(available, rules.horizon);
            ++out.truncated_tp;
            dt_sum += available;
        }
    }
    if (out.truncated_tp)
        out.truncated_mean_dt = static_cast<double>(dt_sum) / static_cast<double>(out.truncated_tp);
    return out;
}

std::uint64_t inspection_plan::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto t : dates) {
        auto v = static_cast<std::uint64_t>(t.time_since_epoch().count());
        for (int i = 0; i < 8; ++i) {
            h ^= (v & 0xff);
            h *= 0x100000001b3ULL;
            v >>= 8;
        }
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t sample, std::uint64_t turbine) {
    std::uint64_t z = splitmix64(master);
    z = splitmix64(z ^ stream);
    z = splitmix64(z ^ sample);
    return splitmix64(z ^ turbine);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inspection_plan sample_random_plan(std::mt19937_64& rng, std::size_t n_dates, const time_range& span,
                                   std::string turbine) {
    const auto n_days = span.whole_days();
    if (n_days <= 0)
        throw range_error("inspection span must contain at least one whole day");
    if (n_dates > static_cast<std::size_t>(n_days))
        throw range_error("more inspection dates requested than days in the span");
    // Floyd's algorithm: distinct day offsets
    std::unordered_set<std::int64_t> chosen;
    std::vector<std::int64_t> picked;
    const auto d = static_cast<std::uint64_t>(n_days);
    for (std::uint64_t j = d - n_dates; j < d; ++j) {
        const auto t = static_cast<std::int64_t>(uniform_below(rng, j + 1));
        const auto v = chosen.insert(t).second ? t : static_cast<std::int64_t>(j);
        if (v != t)
            chosen.insert(v);
        picked.push_back(v);
    }
    std::sort(picked.begin(), picked.end());
    inspection_plan plan;
    plan.turbine = std::move(turbine);
    for (const auto off : picked)
        plan.dates.push_back(span.begin + days(off));
    return plan;
}

alarm_score score_inspection_plan(const inspection_plan& plan, std::span<const failure_event> failures,
                                  const time_range& period, const cost_rules& rules) {
    return score_alarms(plan.dates, failures, rules, period);
}

summary_stats summarize(std::span<const double> samples) {
    if (samples.empty())
        throw data_error("cannot summarise an empty sample");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    summary_stats s;
    s.count = n;
    s.min = v.front();
    s.max = v.back();
    // shifted by the minimum so constant samples give an exact mean and zero spread
    double shifted = 0.0;
    for (const double x : v)
        shifted += x - s.min;
    s.mean = std::clamp(s.min + shifted / static_cast<double>(n), s.min, s.max);
    double sq = 0.0;
    for (const double x : v)
        sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(n));
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, n - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    return s;
}

std::vector<double> cost_distribution::costs_in_euros() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples)
        out.push_back(s.cost.euros());
    return out;
}

const sample_record& cost_distribution::best() const {
    if (samples.empty())
        throw data_error("empty cost distribution");
    return *std::min_element(samples.begin(), samples.end(),
                             [](const sample_record& a, const sample_record& b) { return a.cost < b.cost; });
}

namespace {

sample_record record_of(const alarm_score& s) {
    sample_record r;
    r.cost = s.cost;
    r.n_tp = s.n_tp;
    r.n_fp = s.n_fp;
    r.n_fn = s.n_fn;
    r.mean_dt = s.mean_dt;
    return r;
}

// Adds b into a, keeping mean_dt as the TP-weighted mean.
void accumulate_record(sample_record& a, const sample_record& b) {
    const double dt_total = a.mean_dt * static_cast<double>(a.n_tp) + b.mean_dt * static_cast<double>(b.n_tp);
    a.cost += b.cost;
    a.n_tp += b.n_tp;
    a.n_fp += b.n_fp;
    a.n_fn += b.n_fn;
    a.mean_dt = a.n_tp ? dt_total / static_cast<double>(a.n_tp) : 0.0;
}

// Fleet sample s sums sample pairing[t][s] of every turbine t, each pairing
// an independent seeded shuffle.
void pair_fleet(monte_carlo_result& out, std::uint64_t seed, std::size_t n_samples) {
    out.pairing.clear();
    for (std::size_t t = 0; t < out.turbines.size(); ++t) {
        std::vector<std::size_t> perm(n_samples);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::mt19937_64 rng(derive_seed(seed, 3, 0, t));
        for (std::size_t i = n_samples - 1; i > 0; --i)
            std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
        out.pairing.push_back(std::move(perm));
    }
    out.fleet.samples.assign(n_samples, sample_record{});
    for (std::size_t s = 0; s < n_samples; ++s)
        for (std::size_t t = 0; t < out.turbines.size(); ++t)
            accumulate_record(out.fleet.samples[s], out.turbines[t].samples[out.pairing[t][s]]);
    finish(out.fleet);
}

} // namespace

monte_carlo_result monte_carlo_random(std::uint64_t seed, std::span<const turbine_failures> fleet,
                                      const time_range& period, const cost_rules& rules,
                                      const random_policy_options& options) {
    if (options.n_samples == 0)
        throw range_error("n_samples must be at least 1");
    cost_rules inspection_rules = rules;
    inspection_rules.repeats_are_fp = options.repeats_are_fp;
    monte_carlo_result out;
    out.fleet.label = "fleet";
    out.fleet.seed = seed;
    for (std::size_t t = 0; t < fleet.size(); ++t) {
        cost_distribution d;
        d.label = fleet[t].turbine;
        d.seed = seed;
        d.samples.reserve(options.n_samples);
        for (std::size_t s = 0; s < options.n_samples; ++s) {
            std::mt19937_64 rng(derive_seed(seed, 1, s, t));
            const auto plan = sample_random_plan(rng, options.n_dates, options.span, fleet[t].turbine);
            auto rec = record_of(score_inspection_plan(plan, fleet[t].failures, period, inspection_rules));
            rec.plan_hash = plan.hash();
            d.samples.push_back(rec);
        }
        finish(d);
        out.turbines.push_back(std::move(d));
    }
    pair_fleet(out, seed, options.n_samples);
    return out;
}

monte_carlo_result monte_carlo_model(std::uint64_t seed, const threshold_distribution& dist,
                                     std::span<const turbine_residuals> fleet, const time_range& period,
                                     const cost_rules& rules, std::size_t n_samples, const cusum_options& cusum) {
    if (n_samples == 0)
        throw range_error("n_samples must be at least 1");
    if (dist.mass.empty())
        throw empty_distribution_error("threshold distribution is empty");
    monte_carlo_result out;
    out.fleet.label = "fleet";
    out.fleet.seed = seed;
    for (std::size_t t = 0; t < fleet.size(); ++t) {
        const auto& tr = fleet[t];
        cost_distribution d;
        d.label = tr.residuals.turbine;
        d.seed = seed;
        d.samples.reserve(n_samples);
        // a turbine's outcome depends only on h, so each grid point is run once
        std::map<std::size_t, sample_record> memo;
        for (std::size_t s = 0; s < n_samples; ++s) {
            std::mt19937_64 rng(derive_seed(seed, 2, s, t));
            const auto idx = dist.sample_index(rng);
            auto it = memo.find(idx);
            if (it == memo.end()) {
                auto rec = record_of(score_threshold(tr.residuals, tr.failures, rules, period, dist.h_grid[idx], cusum));
                rec.h = dist.h_grid[idx];
                it = memo.emplace(idx, rec).first;
            }
            d.samples.push_back(it->second);
        }
        finish(d);
        out.turbines.push_back(std::move(d));
    }
    pair_fleet(out, seed, n_samples);
    return out;
}

void write_samples(std::ostream& out, const monte_carlo_result& result) {
    csv::write_row(out, {"sample", "turbine", "h", "plan_hash", "cost", "n_tp", "n_fp", "n_fn", "mean_dt"});
    auto rows = [&](const cost_distribution& d) {
        for (std::size_t s = 0; s < d.samples.size(); ++s) {
            const auto& r = d.samples[s];
            csv::write_row(out, {std::to_string(s), d.label, csv::format_number(r.h), std::to_string(r.plan_hash),
                                 csv::format_number(r.cost.euros()), std::to_string(r.n_tp), std::to_string(r.n_fp),
                                 std::to_string(r.n_fn), csv::format_number(r.mean_dt)});
        }
    };
    for (const auto& d : result.turbines)
        rows(d);
    rows(result.fleet);
}

} // namespace pmaint
