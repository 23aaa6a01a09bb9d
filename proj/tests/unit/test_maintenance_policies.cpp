#include "pmaint/errors.hpp"
#include "pmaint/maintenance_policies.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace pmaint;

namespace {

std::vector<failure_event> fixture() { return parse_failures_file(PMAINT_TEST_DATA "/edp_hydraulic_failures.csv"); }

std::map<std::string, time_range> periods() {
    const period_boundaries b;
    return {{"train", {b.train_begin, b.test1_begin}},
            {"test1", {b.test1_begin, b.test2_begin}},
            {"test2", {b.test2_begin, b.end}},
            {"test1+2", {b.test1_begin, b.end}}};
}

const time_range two_years{parse_timestamp("2016-01-01"), parse_timestamp("2018-01-01")};

std::vector<turbine_failures> fleet_of(const std::vector<failure_event>& fs, std::vector<std::string> names) {
    std::vector<turbine_failures> out;
    for (auto& n : names)
        out.push_back({n, failures_of(fs, n)});
    return out;
}

} // namespace

TEST_CASE("reactive baseline on the hydraulic failure log") {
    const auto fs = fixture();
    auto p = periods();
    CHECK(reactive_cost(fs, p["train"]) == money::from_euros(40000));
    CHECK(reactive_cost(fs, p["test1"]) == money::from_euros(60000));
    CHECK(reactive_cost(fs, p["test2"]) == money::from_euros(60000));
    CHECK(reactive_cost(fs, p["test1+2"]) == money::from_euros(120000));
    CHECK(reactive_cost(std::vector<failure_event>{}, p["train"]) == money{});
    auto syn = synth::failure("T01", p["train"].end);
    syn.synthetic = true;
    CHECK(reactive_cost(std::vector{syn}, p["train"]) == money{});
}

TEST_CASE("maximal savings and the period-truncated bound") {
    const auto fs = fixture();
    auto p = periods();
    CHECK(maximal_savings(fs, p["train"]).full == money::from_euros(-34000));
    CHECK(maximal_savings(fs, p["test1"]).full == money::from_euros(-51000));
    CHECK(maximal_savings(fs, p["test2"]).full == money::from_euros(-51000));
    CHECK(maximal_savings(fs, p["test1+2"]).full == money::from_euros(-102000));
    const auto t11 = maximal_savings(failures_of(fs, "T11"), p["test2"]);
    CHECK(t11.truncated == money::from_cents(-311667));
    CHECK(t11.truncated.whole_euros() == -3117);
    CHECK(t11.truncated_tp == 1);
    CHECK(t11.truncated_mean_dt == 11.0);
    CHECK(maximal_savings(failures_of(fs, "T07"), p["test2"]).truncated == money::from_euros(-13600));
    CHECK(maximal_savings(std::vector<failure_event>{}, p["test2"]).full == money{});
    // a failure within the first two days of a period cannot be caught there
    const std::vector early{synth::failure("T", p["test2"].begin + days(2))};
    CHECK(maximal_savings(early, p["test2"]).truncated == money{});
    CHECK(maximal_savings(early, p["test2"]).truncated_tp == 0);
}

TEST_CASE("random plans: distinct sorted whole days inside the span") {
    std::mt19937_64 rng(3);
    std::vector<double> gaps;
    for (int rep = 0; rep < 2000; ++rep) {
        const auto plan = sample_random_plan(rng, 12, two_years, "T01");
        REQUIRE(plan.dates.size() == 12);
        CHECK(std::is_sorted(plan.dates.begin(), plan.dates.end()));
        CHECK(std::adjacent_find(plan.dates.begin(), plan.dates.end()) == plan.dates.end());
        for (const auto d : plan.dates) {
            CHECK(two_years.contains(d));
            CHECK((d - two_years.begin).count() % 86400 == 0);
        }
        gaps.push_back(static_cast<double>((plan.dates.back() - plan.dates.front()).count()) / 86400.0 / 11.0);
    }
    double mean_gap = 0.0;
    for (double g : gaps)
        mean_gap += g / static_cast<double>(gaps.size());
    // expected range of 12 uniform days out of 731 is 731 * 11/13
    CHECK(std::abs(mean_gap - 731.0 / 13.0) < 1.0);
    const time_range one_day{two_years.begin, two_years.begin + days(1)};
    CHECK(sample_random_plan(rng, 1, one_day).dates == std::vector{two_years.begin});
    CHECK(sample_random_plan(rng, 0, one_day).dates.empty());
    CHECK_THROWS_AS(sample_random_plan(rng, 2, one_day), range_error);
    CHECK_THROWS_AS(sample_random_plan(rng, 1, {two_years.begin, two_years.begin + seconds{3600}}), range_error);
}

TEST_CASE("random plans are uniform over days") {
    std::mt19937_64 rng(17);
    const time_range span{two_years.begin, two_years.begin + days(20)};
    std::vector<int> hits(20, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i)
        for (const auto d : sample_random_plan(rng, 5, span).dates)
            ++hits[static_cast<std::size_t>((d - span.begin).count() / 86400)];
    double chi2 = 0.0;
    const double expect = n * 5.0 / 20.0;
    for (int h : hits)
        chi2 += (h - expect) * (h - expect) / expect;
    CHECK(chi2 < 43.8); // 99.9% point of chi-square with 19 degrees of freedom
}

TEST_CASE("derived seeds and bounded draws") {
    CHECK(derive_seed(1, 1, 0, 0) == derive_seed(1, 1, 0, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 100; ++s)
        for (std::uint64_t t = 0; t < 10; ++t)
            seen.insert(derive_seed(42, 1, s, t));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(42, 1, 0, 0) != derive_seed(42, 2, 0, 0));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i)
        CHECK(uniform_below(rng, 7) < 7);
}

TEST_CASE("scoring single inspections") {
    const auto f = parse_timestamp("2017-10-19T10:11:00");
    const std::vector fs{synth::failure("T07", f)};
    const time_range test2 = periods()["test2"];
    inspection_plan plan{"T07", {f - days(60)}};
    // 60 days ahead falls before test2 starts, so it is ignored there
    CHECK(score_inspection_plan(plan, fs, test2).cost == money::from_euros(20000));
    CHECK(score_inspection_plan(plan, fs, two_years).cost == money::from_euros(-17000));
    plan.dates = {f - days(1)};
    CHECK(score_inspection_plan(plan, fs, test2).cost == money::from_euros(22000));
    // best single inspection inside test2
    money best = money::from_euros(1e9);
    for (auto d = two_years.begin; d < two_years.end; d += days(1)) {
        plan.dates = {d};
        best = std::min(best, score_inspection_plan(plan, fs, test2).cost);
    }
    CHECK(best == money::from_euros(-13600));
}

TEST_CASE("healthy turbine under random inspections pays the expected false alarms") {
    const time_range test2 = periods()["test2"];
    const std::vector<turbine_failures> fleet{{"T01", {}}};
    const auto r = monte_carlo_random(99, fleet, test2, {}, {10000, 12, two_years});
    const auto& s = r.turbines[0].stats;
    const double expected = 2000.0 * 12.0 * 122.0 / 731.0;
    CHECK(std::abs(s.mean - 4000.0) < 200.0);
    CHECK(std::abs(s.mean - expected) < 3.0 * s.stddev / 100.0);
    for (const auto& x : r.turbines[0].samples)
        CHECK(x.n_tp + x.n_fn == 0);
}

TEST_CASE("random Monte Carlo: determinism, fleet sums, dominance, reactive ceiling") {
    const auto fs = fixture();
    const auto fleet = fleet_of(fs, {"T01", "T06", "T07", "T09", "T11"});
    const auto period = periods()["test1+2"];
    const random_policy_options opt{2000, 12, two_years};
    const auto a = monte_carlo_random(5, fleet, period, {}, opt);
    const auto b = monte_carlo_random(5, fleet, period, {}, opt);
    const auto c = monte_carlo_random(6, fleet, period, {}, opt);
    std::ostringstream sa, sb, sc;
    write_samples(sa, a);
    write_samples(sb, b);
    write_samples(sc, c);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() != sc.str());
    CHECK(sa.str().rfind("sample,turbine,h,plan_hash,cost,n_tp,n_fp,n_fn,mean_dt\n", 0) == 0);

    REQUIRE(a.turbines.size() == 5);
    REQUIRE(a.fleet.samples.size() == 2000);
    for (std::size_t s = 0; s < 2000; ++s) {
        money sum;
        for (std::size_t t = 0; t < 5; ++t)
            sum += a.turbines[t].samples[a.pairing[t][s]].cost;
        CHECK(a.fleet.samples[s].cost == sum);
    }
    for (std::size_t t = 0; t < 5; ++t) {
        auto perm = a.pairing[t];
        std::sort(perm.begin(), perm.end());
        for (std::size_t s = 0; s < perm.size(); ++s)
            REQUIRE(perm[s] == s);
        const auto bound = maximal_savings(fleet[t].failures, period).full;
        const auto reactive = reactive_cost(fleet[t].failures, period);
        for (const auto& x : a.turbines[t].samples) {
            CHECK(x.cost >= bound);
            if (x.n_tp == 0 && x.n_fp == 0)
                CHECK(x.cost == reactive);
        }
        // stats are recomputable from the samples
        const auto st = summarize(a.turbines[t].costs_in_euros());
        CHECK(st.mean == a.turbines[t].stats.mean);
        CHECK(st.q3 == a.turbines[t].stats.q3);
    }
    const auto zero = monte_carlo_random(1, fleet, period, {}, {50, 0, two_years});
    for (const auto& x : zero.turbines[0].samples)
        CHECK(x.cost == money{});
}

TEST_CASE("random plan scores agree with the brute-force classifier") {
    const auto fs = fixture();
    std::mt19937_64 rng(8);
    for (const auto& [name, period] : periods())
        for (int rep = 0; rep < 200; ++rep) {
            const auto plan = sample_random_plan(rng, 12, two_years);
            for (const std::string t : {"T06", "T07", "T11"}) {
                const auto mine = failures_of(fs, t);
                std::vector<std::int64_t> as;
                for (const auto d : plan.dates)
                    as.push_back(static_cast<std::int64_t>(d.time_since_epoch().count()));
                const auto b = period.begin.time_since_epoch().count();
                const auto e = period.end.time_since_epoch().count();
                const auto want = oracle::classify(as, mine, b, e);
                CHECK(score_inspection_plan(plan, mine, period).cost.cents() == want.cost_cents);
                cost_rules free_repeats;
                free_repeats.repeats_are_fp = false;
                const auto want_free = oracle::classify(as, mine, b, e, 200000, false);
                CHECK(score_inspection_plan(plan, mine, period, free_repeats).cost.cents() == want_free.cost_cents);
            }
        }
}

TEST_CASE("model Monte Carlo: point mass, always-saving drift, errors") {
    const auto start = parse_timestamp("2017-01-01");
    const std::size_t n = 144 * 80;
    residual_series r;
    r.grid = time_grid(start, ten_minutes, n);
    r.turbine = "T07";
    r.values.assign(n, 0.0);
    for (std::size_t k = 144 * 20; k < n; ++k)
        r.values[k] = 1.0;
    const std::vector fs{synth::failure("T07", start + days(70))};
    const time_range period{start, start + days(80)};
    const std::vector<turbine_residuals> fleet{{r, fs}};

    threshold_distribution point;
    point.h_grid = {500, 1000};
    point.mass = {0.0, 1.0};
    const auto a = monte_carlo_model(3, point, fleet, period, {}, 500);
    CHECK(a.fleet.stats.stddev == 0.0);
    CHECK(a.turbines[0].samples[0].h == 1000.0);

    // every threshold up to 144*10 is reached between 40 and 50 days ahead
    threshold_distribution spread;
    for (double h = 100; h <= 1400; h += 100) {
        spread.h_grid.push_back(h);
        spread.mass.push_back(1.0 / 14.0);
    }
    const auto b = monte_carlo_model(3, spread, fleet, period, {}, 1000);
    std::set<double> used;
    for (const auto& x : b.turbines[0].samples) {
        CHECK(x.cost < money{});
        CHECK(x.n_tp == 1);
        used.insert(x.h);
    }
    CHECK(used.size() == 14);
    CHECK(b.turbines[0].stats.min == doctest::Approx(-17000.0 * 49 / 60).epsilon(1e-6));

    threshold_distribution empty;
    CHECK_THROWS_AS(monte_carlo_model(3, empty, fleet, period, {}, 10), empty_distribution_error);
}

TEST_CASE("summaries") {
    const std::vector<double> three{3, 1, 2};
    const auto s = summarize(three);
    CHECK(s.mean == 2.0);
    CHECK(s.min == 1.0);
    CHECK(s.max == 3.0);
    CHECK(s.median == 2.0);
    CHECK(s.q1 == 1.5);
    CHECK(s.q3 == 2.5);
    CHECK(s.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)));
    const std::vector<double> flat(10, 4.0);
    CHECK(summarize(flat).stddev == 0.0);
    CHECK_THROWS_AS(summarize(std::vector<double>{}), data_error);
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g;
    std::vector<double> x(10000);
    for (auto& v : x)
        v = g(rng);
    const auto n = summarize(x);
    CHECK(std::abs(n.mean) < 0.05);
    CHECK(std::abs(n.stddev - 1.0) < 0.05);
}
