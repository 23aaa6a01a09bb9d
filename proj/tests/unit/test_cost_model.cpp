#include "pmaint/cost_model.hpp"
#include "pmaint/errors.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace pmaint;

namespace {

const timestamp t0 = parse_timestamp("2016-01-01");
const auto F = parse_timestamp("2016-06-01T12:00:00");
const time_range year{t0, parse_timestamp("2017-01-01")};

std::int64_t secs(timestamp t) { return static_cast<std::int64_t>(t.time_since_epoch().count()); }

std::vector<timestamp> before(timestamp f, std::initializer_list<int> ds) {
    std::vector<timestamp> out;
    for (int d : ds)
        out.push_back(f - days(d));
    return out;
}

cost_profile flat_profile(std::string name, const std::vector<double>& grid, std::vector<double> euros) {
    cost_profile p;
    p.turbine = std::move(name);
    p.h_grid = grid;
    for (double e : euros)
        p.cost.push_back(money::from_euros(e));
    return p;
}

} // namespace

TEST_CASE("worked cost example: one TP at 42 days, two FPs") {
    const std::vector fs{synth::failure("T11", F)};
    const auto s = score_alarms(before(F, {61, 42, 1}), fs, {}, year);
    CHECK(s.cost == money::from_euros(-7900));
    CHECK(s.n_tp == 1);
    CHECK(s.n_fp == 2);
    CHECK(s.n_fn == 0);
    CHECK(s.mean_dt == 42.0);
    CHECK(s.tp_savings == money::from_euros(11900));
    CHECK(s.fp_total == money::from_euros(4000));
}

TEST_CASE("worked cost example: TP at 13 days costs 316.67") {
    const std::vector fs{synth::failure("T11", F)};
    const auto s = score_alarms(before(F, {61, 13, 1}), fs, {}, year);
    CHECK(s.cost == money::from_cents(31667));
    CHECK(s.cost.whole_euros() == 317);
}

TEST_CASE("uncharged repeats: later in-window alarms are free, others still cost") {
    const std::vector fs{synth::failure("T11", F)};
    cost_rules r;
    r.repeats_are_fp = false;
    const auto s = score_alarms(before(F, {61, 42, 30, 2, 1}), fs, r, year);
    CHECK(s.n_tp == 1);
    CHECK(s.n_repeat == 1);
    CHECK(s.n_fp == 3);
    CHECK(s.cost == money::from_euros(-11900 + 6000));
    const auto charged = score_alarms(before(F, {61, 42, 30, 2, 1}), fs, {}, year);
    CHECK(charged.n_repeat == 0);
    CHECK(charged.n_fp == 4);
}

TEST_CASE("missed failure and empty cases") {
    const std::vector fs{synth::failure("T11", F)};
    CHECK(score_alarms({}, fs, {}, year).cost == money::from_euros(20000));
    CHECK(score_alarms({}, fs, {}, year).n_fn == 1);
    CHECK(score_alarms({}, std::vector<failure_event>{}, {}, year).cost == money{});
    // window edges: 60 days earns the full reward, 2 days is too late, 61 too early
    CHECK(score_alarms(before(F, {60}), fs, {}, year).cost == money::from_euros(-17000));
    CHECK(score_alarms(before(F, {2}), fs, {}, year).cost == money::from_euros(22000));
    CHECK(score_alarms(before(F, {3}), fs, {}, year).cost == money::from_cents(-85000));
    // a second in-window alarm is a false positive
    CHECK(score_alarms(before(F, {50, 40}), fs, {}, year).cost == money::from_cents(-1416667 + 200000));
}

TEST_CASE("Δt is floored to whole days") {
    const std::vector fs{synth::failure("T11", F)};
    const std::vector<timestamp> a{F - days(42) - seconds{600}};
    CHECK(score_alarms(a, fs, {}, year).mean_dt == 42.0);
    const std::vector<timestamp> b{F - days(3) + seconds{1}};
    CHECK(score_alarms(b, fs, {}, year).n_fp == 1);
}

TEST_CASE("alarms after the last failure and outside the period") {
    const std::vector fs{synth::failure("T11", F)};
    const std::vector<timestamp> a{F + days(5), t0 - days(10), F - days(30)};
    const auto s = score_alarms(a, fs, {}, year);
    CHECK(s.n_fp == 1);
    CHECK(s.n_tp == 1);
    CHECK(s.cost == money::from_euros(-8500 + 2000));
}

TEST_CASE("synthetic failures neither reward nor penalise misses") {
    auto f = synth::failure("T01", year.end);
    f.synthetic = true;
    f.fp_cost = money::from_euros(500);
    const std::vector fs{f};
    CHECK(score_alarms({}, fs, {}, year).cost == money{});
    const auto s = score_alarms(before(year.end, {30, 10}), fs, {}, year);
    CHECK(s.n_tp == 0);
    CHECK(s.n_tp_synthetic == 1);
    CHECK(s.n_fp == 1);
    CHECK(s.cost == money::from_euros(500));
}

TEST_CASE("per-event cost overrides") {
    auto f = synth::failure("T11", F);
    f.tp_reward_rate = money::from_euros(6000);
    f.fn_cost = money::from_euros(9000);
    const std::vector fs{f};
    CHECK(score_alarms(before(F, {30}), fs, {}, year).cost == money::from_euros(-3000));
    CHECK(score_alarms({}, fs, {}, year).cost == money::from_euros(9000));
}

TEST_CASE("score_alarms matches the brute-force classifier on 500 random CUSUM runs") {
    std::mt19937_64 rng(500);
    std::normal_distribution<double> g(0.0, 1.0);
    int tps = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 600 + rng() % 1401; // at most 2000 steps
        const auto start = t0 + seconds{static_cast<std::int64_t>(rng() % 86400)};
        residual_series r;
        r.grid = time_grid(start, ten_minutes, n);
        r.turbine = "T";
        double level = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (rng() % 50 == 0)
                level += g(rng);
            r.values.push_back(level + g(rng));
        }
        const time_range period{start, start + seconds{600 * static_cast<std::int64_t>(n)}};
        std::vector<failure_event> fs;
        const int nf = static_cast<int>(rng() % 4);
        for (int i = 0; i < nf; ++i) {
            auto f = synth::failure("T", start + seconds{static_cast<std::int64_t>(rng() % (600 * n + 86400 * 3))});
            f.synthetic = rng() % 5 == 0;
            fs.push_back(f);
        }
        std::sort(fs.begin(), fs.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
        // short run: shrink the window so in-window alarms are common
        cost_rules rules;
        rules.window_lower = 1;
        rules.window_upper = 5;
        rules.horizon = 5;
        const double h = 5.0 + static_cast<double>(rng() % 200);
        const auto cus = run_cusum(r, fs, h, period, {0, 1, true});
        std::vector<timestamp> alarms;
        std::vector<std::int64_t> alarm_secs;
        for (const auto& a : cus.alarms) {
            alarms.push_back(a.at);
            alarm_secs.push_back(secs(a.at));
        }
        const auto got = score_alarms(alarms, fs, rules, period);
        // the oracle hard-codes the default (2, 60] window, so score with both rules
        const auto want_default = oracle::classify(alarm_secs, fs, secs(period.begin), secs(period.end));
        const auto got_default = score_alarms(alarms, fs, {}, period);
        CHECK(got_default.cost.cents() == want_default.cost_cents);
        CHECK(static_cast<int>(got_default.n_tp) == want_default.n_tp);
        CHECK(static_cast<int>(got_default.n_fp) == want_default.n_fp);
        CHECK(static_cast<int>(got_default.n_fn) == want_default.n_fn);
        CHECK(got.n_tp + got.n_fn == static_cast<std::size_t>(std::count_if(fs.begin(), fs.end(), [&](const auto& f) {
                  return !f.synthetic && period.contains(f.at);
              })));
        tps += static_cast<int>(got.n_tp);
    }
    CHECK(tps > 50);
}

TEST_CASE("brute-force agreement on dense alarm/failure timelines") {
    std::mt19937_64 rng(4242);
    for (int rep = 0; rep < 2000; ++rep) {
        std::vector<failure_event> fs;
        for (int i = 0; i < static_cast<int>(rng() % 5); ++i) {
            auto f = synth::failure("T", t0 + seconds{static_cast<std::int64_t>(rng() % (86400 * 200))});
            f.synthetic = rng() % 6 == 0;
            fs.push_back(f);
        }
        std::sort(fs.begin(), fs.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
        std::vector<timestamp> alarms;
        std::vector<std::int64_t> as;
        for (int i = 0; i < static_cast<int>(rng() % 12); ++i) {
            const auto a = t0 + seconds{static_cast<std::int64_t>(rng() % (86400 * 200))};
            alarms.push_back(a);
            as.push_back(secs(a));
        }
        std::sort(alarms.begin(), alarms.end());
        const time_range period{t0 + days(10), t0 + days(190)};
        const auto got = score_alarms(alarms, fs, {}, period);
        const auto want = oracle::classify(as, fs, secs(period.begin), secs(period.end));
        CHECK(got.cost.cents() == want.cost_cents);
        CHECK(static_cast<int>(got.n_fp) == want.n_fp);
        CHECK(static_cast<int>(got.n_fn) == want.n_fn);
        cost_rules free_repeats;
        free_repeats.repeats_are_fp = false;
        const auto got_free = score_alarms(alarms, fs, free_repeats, period);
        const auto want_free = oracle::classify(as, fs, secs(period.begin), secs(period.end), 200000, false);
        CHECK(got_free.cost.cents() == want_free.cost_cents);
        CHECK(static_cast<int>(got_free.n_repeat) == want_free.n_repeat);
        CHECK(got_free.n_fp + got_free.n_repeat == got.n_fp);
        CHECK(got_free.cost <= got.cost);
        // reward bound
        CHECK(got.tp_savings.cents() <= 1700000 * static_cast<std::int64_t>(fs.size()));
    }
}

TEST_CASE("cost_rules validation") {
    cost_rules r;
    CHECK_NOTHROW(r.validate());
    r.window_lower = 0;
    CHECK_THROWS_AS(r.validate(), range_error);
    r = {};
    r.window_upper = 61;
    CHECK_THROWS_AS(r.validate(), range_error);
}

TEST_CASE("cost profile of a single drift: savings band, then a missed failure") {
    // flat residuals, then +1 per step from day 20 until the failure on day 50
    const std::size_t n = 144 * 70;
    residual_series r;
    r.grid = time_grid(t0, ten_minutes, n);
    r.turbine = "T";
    r.values.assign(n, 0.0);
    for (std::size_t k = 144 * 20; k < n; ++k)
        r.values[k] = 1.0;
    const std::vector fs{synth::failure("T", t0 + days(50))};
    const time_range period{t0, t0 + days(70)};
    const auto grid = default_h_grid(100.0, 10000.0, 100.0);
    const auto prof = compute_cost_profile(r, fs, {}, period, grid);
    REQUIRE(prof.cost.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double h = grid[i];
        const auto steps = static_cast<std::int64_t>(std::ceil(h));
        // first alarm at day 20 + steps/144; after it the ground absorbs the drift
        const auto alarm = t0 + days(20) + seconds{600 * (steps - 1)};
        const auto dt = (secs(t0 + days(50)) - secs(alarm)) / 86400;
        money want;
        if (steps > 144 * 30)
            want = money::from_euros(20000);
        else if (dt > 2)
            want = -money::from_euros(17000).scaled(dt, 60);
        else
            want = money::from_euros(22000);
        CHECK(prof.cost[i] == want);
        CHECK(prof.cost[i] == score_threshold(r, fs, {}, period, h).cost);
    }
    CHECK(prof.cost.front() == money::from_euros(-17000).scaled(29, 60));
    CHECK_THROWS_AS(compute_cost_profile(r, fs, {}, period, std::vector<double>{200.0, 100.0}), range_error);
}

TEST_CASE("threshold distribution: single accepted h") {
    const std::vector<double> grid{100, 200, 300};
    const std::vector profs{flat_profile("A", grid, {20000, -17000, 25000})};
    const auto d = build_threshold_distribution(profs);
    CHECK(d.mass == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(d.contributors == std::vector<std::string>{"A"});
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i)
        CHECK(d.sample(rng) == 200.0);
    const auto m = moments_of(d);
    CHECK(m.mean == 200.0);
    CHECK(m.stddev == 0.0);
}

TEST_CASE("threshold distribution: disjoint bands share mass equally") {
    const std::vector<double> grid{100, 200, 300, 400};
    const std::vector profs{flat_profile("A", grid, {0, 10000, 20000, 20000}),
                            flat_profile("B", grid, {20000, 20000, 15000, -17000})};
    const auto d = build_threshold_distribution(profs);
    // A: f = {20000, 10000} → {2/3, 1/3}; B: f = {5000, 37000} → {5/42, 37/42}
    CHECK(d.mass[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(d.mass[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(d.mass[2] == doctest::Approx(5.0 / 84.0).epsilon(1e-12));
    CHECK(d.mass[3] == doctest::Approx(37.0 / 84.0).epsilon(1e-12));
    CHECK(d.mass[0] + d.mass[1] == doctest::Approx(0.5));
}

TEST_CASE("threshold distribution: degenerate turbines drop out, errors") {
    const std::vector<double> grid{100, 200};
    const std::vector profs{flat_profile("A", grid, {20000, 30000}), flat_profile("B", grid, {0, 20000})};
    const auto d = build_threshold_distribution(profs);
    CHECK(d.contributors == std::vector<std::string>{"B"});
    CHECK(d.mass == std::vector<double>{1.0, 0.0});
    const std::vector dead{flat_profile("A", grid, {20000, 30000})};
    CHECK_THROWS_AS(build_threshold_distribution(dead), empty_distribution_error);
    const std::vector mismatch{flat_profile("A", grid, {0, 0}), flat_profile("B", {100, 300}, {0, 0})};
    CHECK_THROWS_AS(build_threshold_distribution(mismatch), reference_error);
}

TEST_CASE("threshold distribution normalization on random profiles") {
    std::mt19937_64 rng(21);
    const auto grid = default_h_grid();
    CHECK(grid.size() == 1500);
    CHECK(grid.front() == 100.0);
    CHECK(grid.back() == 150000.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<cost_profile> profs;
        for (int t = 0; t < 5; ++t) {
            std::vector<double> e;
            for (std::size_t i = 0; i < grid.size(); ++i)
                e.push_back(static_cast<double>(static_cast<int>(rng() % 60000) - 25000));
            profs.push_back(flat_profile("T" + std::to_string(t), grid, e));
        }
        const auto d = build_threshold_distribution(profs);
        double sum = 0.0;
        for (std::size_t i = 0; i < d.mass.size(); ++i) {
            CHECK(d.mass[i] >= 0.0);
            bool any = false;
            for (const auto& p : profs)
                any = any || p.cost[i] < money::from_euros(20000);
            if (!any)
                CHECK(d.mass[i] == 0.0);
            sum += d.mass[i];
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("sampling follows the mass") {
    threshold_distribution d;
    d.h_grid = {1, 2, 3};
    d.mass = {0.2, 0.0, 0.8};
    std::mt19937_64 rng(5);
    int ones = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double h = d.sample(rng);
        CHECK(h != 2.0);
        ones += h == 1.0;
    }
    CHECK(std::abs(ones / double(n) - 0.2) < 0.005);
}

TEST_CASE("moments and sensitivity arithmetic") {
    threshold_distribution d;
    d.h_grid = {10000, 20000};
    d.mass = {0.5, 0.5};
    const auto m = moments_of(d);
    CHECK(m.mean == doctest::Approx(15000));
    CHECK(m.stddev == doctest::Approx(5000));
    CHECK(detection_days(19400, 10) == doctest::Approx(13.4722).epsilon(1e-4));
    CHECK(std::round(detection_days(19400, 10) * 100) / 100 == 13.47);
    CHECK(minimal_shift(19400) == doctest::Approx(2.2454).epsilon(1e-4));
    CHECK(std::round(minimal_shift(19400) * 1000) / 1000 == 2.245);
}

TEST_CASE("profile and distribution CSV round trip") {
    const std::vector<double> grid{100, 200, 300};
    std::ostringstream p;
    write_profile(p, flat_profile("A", grid, {1.5, -2, 3}));
    CHECK(p.str() == "h,cost\n100,1.5\n200,-2\n300,3\n");
    threshold_distribution d;
    d.h_grid = grid;
    d.mass = {0.1, 0.2, 0.7};
    std::ostringstream o;
    write_distribution(o, d);
    std::istringstream i(o.str());
    const auto back = read_distribution(i);
    CHECK(back.h_grid == d.h_grid);
    CHECK(back.mass == d.mass);
    std::istringstream bad("h,value\n100,-0.5\n");
    CHECK_THROWS(read_distribution(bad));
}
