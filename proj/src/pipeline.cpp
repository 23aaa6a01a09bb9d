#include "pmaint/pipeline.hpp"

#include "pmaint/csv.hpp"
#include "pmaint/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace pmaint {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw io_error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw io_error("cannot write '" + tmp.string() + "'");
        f << content;
        f.flush();
        if (!f)
            throw io_error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw io_error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

pipeline::pipeline(pipeline_config config) : config_(std::move(config)) {}

const sensor_panel& pipeline::panel() {
    if (!panel_) {
        auto raw = parse_scada_file(config_.scada.string(), config_.columns);
        panel_ = drop_dead_sensors(raw, config_.dead_sensors);
    }
    return *panel_;
}

const std::vector<failure_event>& pipeline::failures() {
    if (!failures_) {
        auto all = parse_failures_file(config_.failures.string(), panel().turbines(), config_.event_costs());
        if (!config_.failure_components.empty())
            std::erase_if(all, [&](const failure_event& f) {
                return std::find(config_.failure_components.begin(), config_.failure_components.end(),
                                 f.component) == config_.failure_components.end();
            });
        failures_ = std::move(all);
    }
    return *failures_;
}

const std::vector<period_split>& pipeline::periods() {
    if (!periods_)
        periods_ = split_periods(panel().grid(), config_.periods);
    return *periods_;
}

const period_split& pipeline::period(std::string_view name) {
    return find_period(periods(), name);
}

const health_mask& pipeline::mask() {
    if (!mask_)
        mask_ = build_health_mask(failures(), panel().grid(), panel().turbines(), config_.cut_days);
    return *mask_;
}

const median_turbine& pipeline::median() {
    if (!median_)
        median_ = build_median_turbine(panel(), mask());
    return *median_;
}

const seasonal_regression_model& pipeline::model() {
    if (!model_) {
        nbm_fit_options opt;
        opt.daily_order = config_.daily_order;
        opt.yearly_order = config_.yearly_order;
        opt.lambda = config_.lambda;
        opt.fit_range = period("train").range;
        opt.epoch = period("train").range.begin;
        model_ = fit_nbm(median(), config_.target, opt);
    }
    return *model_;
}

const std::vector<residual_series>& pipeline::residuals() {
    if (!residuals_) {
        std::vector<residual_series> out;
        for (const auto& t : panel().turbines())
            out.push_back(pmaint::residuals(panel(), t, model()));
        residuals_ = std::move(out);
    }
    return *residuals_;
}

const std::vector<cost_profile>& pipeline::profiles() {
    if (!profiles_) {
        const auto& train = period("train").range;
        const auto with_terminal = append_terminal_failure(failures(), panel().turbines(), train, config_.rules.fp_cost);
        const auto grid = default_h_grid(config_.h_min, config_.h_max, config_.h_step);
        std::vector<cost_profile> out;
        for (const auto& r : residuals())
            out.push_back(compute_cost_profile(r, failures_of(with_terminal, r.turbine), config_.rules, train, grid,
                                               config_.cusum));
        profiles_ = std::move(out);
    }
    return *profiles_;
}

const threshold_distribution& pipeline::distribution() {
    if (!dist_)
        dist_ = build_threshold_distribution(profiles(), config_.cap);
    return *dist_;
}

std::filesystem::path pipeline::out(const std::string& name) {
    return config_.output / name;
}

std::vector<std::string> pipeline::period_names(std::string_view p) {
    std::vector<std::string> names;
    if (p == "all") {
        for (const auto& s : periods())
            names.push_back(s.name);
    } else {
        names.push_back(period(p).name);
    }
    return names;
}

stage_output pipeline::run_frankenstein() {
    stage_output o;
    std::ostringstream csv_out;
    column_map map = config_.columns;
    map.sensors.clear();
    write_scada(csv_out, median().as_panel(), map);
    o.files.push_back(out("frankenstein.csv"));
    write_file_atomic(o.files.back(), csv_out.str());

    // unhealthy stretches as half-open [begin, end) intervals
    std::ostringstream m;
    csv::write_row(m, {"turbine", "begin", "end"});
    const auto& hm = mask();
    const auto& grid = hm.grid();
    for (std::size_t t = 0; t < hm.turbines().size(); ++t) {
        std::size_t k = 0;
        while (k < grid.count) {
            if (hm.healthy(t, k)) {
                ++k;
                continue;
            }
            const auto b = k;
            while (k < grid.count && !hm.healthy(t, k))
                ++k;
            csv::write_row(m, {hm.turbines()[t], format_timestamp(grid.at(b)), format_timestamp(grid.at(k))});
        }
    }
    o.files.push_back(out("health_mask.csv"));
    write_file_atomic(o.files.back(), m.str());
    return o;
}

stage_output pipeline::run_fit() {
    stage_output o;
    std::ostringstream s;
    write_model(s, model());
    o.files.push_back(out("model.nbm"));
    write_file_atomic(o.files.back(), s.str());
    return o;
}

stage_output pipeline::run_scan() {
    nbm_fit_options base;
    base.lambda = config_.lambda;
    base.fit_range = period("train").range;
    base.epoch = period("train").range.begin;
    const auto rows = scan_seasonality(median(), config_.target, config_.scan_orders, base, panel(), periods());
    std::ostringstream s;
    csv::write_row(s, {"daily_order", "yearly_order", "period", "mean", "std", "count", "error"});
    for (const auto& r : rows)
        csv::write_row(s, {std::to_string(r.daily_order), std::to_string(r.yearly_order), r.period,
                           csv::format_number(r.mean), csv::format_number(r.stddev), std::to_string(r.count),
                           r.error});
    stage_output o;
    o.files.push_back(out("scan.csv"));
    write_file_atomic(o.files.back(), s.str());
    return o;
}

stage_output pipeline::run_residuals() {
    stage_output o;
    std::ostringstream summary;
    csv::write_row(summary, {"turbine", "reference_mean", "reference_std", "mean_ok", "spread_ok", "mean_violations",
                             "spread_violations"});
    for (const auto& r : residuals()) {
        const auto ms = compute_moving_stats(r, config_.window_days, config_.reference_days);
        std::ostringstream s;
        csv::write_row(s, {"timestamp", "residual", "moving_mean", "moving_std"});
        for (std::size_t k = 0; k < r.values.size(); ++k)
            csv::write_row(s, {format_timestamp(r.grid.at(k)), csv::format_number(r.values[k]),
                               csv::format_number(ms.mean[k]), csv::format_number(ms.stddev[k])});
        o.files.push_back(out("residuals_" + r.turbine + ".csv"));
        write_file_atomic(o.files.back(), s.str());
        const auto st = check_stability(ms);
        csv::write_row(summary, {r.turbine, csv::format_number(ms.reference_mean),
                                 csv::format_number(ms.reference_std), st.mean_ok ? "true" : "false",
                                 st.spread_ok ? "true" : "false", std::to_string(st.mean_violations.size()),
                                 std::to_string(st.spread_violations.size())});
    }
    o.files.push_back(out("stability.csv"));
    write_file_atomic(o.files.back(), summary.str());
    return o;
}

stage_output pipeline::run_cusum(std::string_view period_name, double h) {
    const auto& p = period(period_name);
    cusum_options opt = config_.cusum;
    opt.record_trace = true;
    stage_output o;
    std::ostringstream alarms;
    csv::write_row(alarms, {"turbine", "timestamp", "sign", "cusum", "ground_before", "ground_after", "run_length"});
    for (const auto& r : residuals()) {
        const auto res = pmaint::run_cusum(r, failures_of(failures(), r.turbine), h, p.range, opt);
        std::ostringstream s;
        write_cusum_trace(s, res, r.grid);
        o.files.push_back(out("cusum_" + r.turbine + ".csv"));
        write_file_atomic(o.files.back(), s.str());
        for (const auto& a : res.alarms)
            csv::write_row(alarms, {r.turbine, format_timestamp(a.at), std::to_string(a.sign),
                                    csv::format_number(a.cusum), csv::format_number(a.ground_before),
                                    csv::format_number(a.ground_after), std::to_string(a.run_length)});
    }
    o.files.push_back(out("alarms_" + p.name + ".csv"));
    write_file_atomic(o.files.back(), alarms.str());
    return o;
}

stage_output pipeline::run_profile() {
    stage_output o;
    for (const auto& p : profiles()) {
        std::ostringstream s;
        write_profile(s, p);
        o.files.push_back(out("profile_" + p.turbine + ".csv"));
        write_file_atomic(o.files.back(), s.str());
    }
    return o;
}

stage_output pipeline::run_dist() {
    const auto& d = distribution();
    stage_output o;
    std::ostringstream s;
    write_distribution(s, d);
    o.files.push_back(out("dist.csv"));
    write_file_atomic(o.files.back(), s.str());
    const auto m = moments_of(d);
    o.moments = m;
    nlohmann::ordered_json j;
    j["mean"] = m.mean;
    j["std"] = m.stddev;
    j["contributors"] = d.contributors;
    j["detection_days_10"] = detection_days(m.mean, 10.0);
    j["minimal_shift_60d"] = minimal_shift(m.mean, 60.0);
    o.files.push_back(out("dist_moments.json"));
    write_file_atomic(o.files.back(), j.dump(2) + "\n");
    return o;
}

monte_carlo_result pipeline::simulate_model(const time_range& range) {
    std::vector<turbine_residuals> fleet;
    for (const auto& r : residuals())
        fleet.push_back({r, failures_of(failures(), r.turbine)});
    return monte_carlo_model(config_.seed, distribution(), fleet, range, config_.rules, config_.n_samples,
                             config_.cusum);
}

monte_carlo_result pipeline::simulate_random(const time_range& range) {
    std::vector<turbine_failures> fleet;
    for (const auto& t : panel().turbines())
        fleet.push_back({t, failures_of(failures(), t)});
    random_policy_options opt;
    opt.n_samples = config_.n_samples;
    opt.n_dates = config_.n_dates;
    opt.span = config_.span();
    opt.repeats_are_fp = config_.charge_repeat_inspections;
    return monte_carlo_random(config_.seed, fleet, range, config_.rules, opt);
}

namespace {

std::string samples_csv(const monte_carlo_result& r) {
    std::ostringstream s;
    write_samples(s, r);
    return s.str();
}

} // namespace

stage_output pipeline::run_simulate(std::string_view period_name) {
    stage_output o;
    for (const auto& name : period_names(period_name)) {
        const auto mc = simulate_model(period(name).range);
        o.files.push_back(out("samples_model_" + name + ".csv"));
        write_file_atomic(o.files.back(), samples_csv(mc));
        o.rows.push_back(row_of("model", name, mc.fleet));
    }
    return o;
}

stage_output pipeline::run_baseline(std::string_view kind, std::string_view period_name) {
    if (kind != "reactive" && kind != "random" && kind != "maximal")
        throw config_error("unknown baseline '" + std::string(kind) + "' (expected reactive, random or maximal)");
    stage_output o;
    for (const auto& name : period_names(period_name)) {
        const auto& range = period(name).range;
        if (kind == "reactive") {
            std::size_t n = 0;
            for (const auto& f : failures())
                n += (!f.synthetic && range.contains(f.at)) ? 1 : 0;
            o.rows.push_back(constant_row("reactive", name, reactive_cost(failures(), range), 0, n, 0.0));
        } else if (kind == "maximal") {
            const auto b = maximal_savings(failures(), range, config_.rules);
            std::size_t n = 0;
            for (const auto& f : failures())
                n += (!f.synthetic && range.contains(f.at)) ? 1 : 0;
            o.rows.push_back(constant_row("maximal", name, b.full, n, 0, n ? config_.rules.window_upper : 0.0));
            o.rows.push_back(
                constant_row("maximal_truncated", name, b.truncated, b.truncated_tp, 0, b.truncated_mean_dt));
        } else {
            const auto mc = simulate_random(range);
            o.files.push_back(out("samples_random_" + name + ".csv"));
            write_file_atomic(o.files.back(), samples_csv(mc));
            o.rows.push_back(row_of("random", name, mc.fleet));
        }
    }
    return o;
}

stage_output pipeline::run_report(std::string_view period_name) {
    stage_output o;
    for (const auto& name : period_names(period_name)) {
        const auto& range = period(name).range;
        report_document doc;
        doc.period = name;
        doc.begin = range.begin;
        doc.end = range.end;
        doc.seed = config_.seed;
        doc.n_samples = config_.n_samples;
        doc.turbines = panel().turbines();

        const auto reactive = reactive_cost(failures(), range);
        const auto bound = maximal_savings(failures(), range, config_.rules);
        std::size_t n_fail = 0;
        for (const auto& f : failures())
            n_fail += (!f.synthetic && range.contains(f.at)) ? 1 : 0;
        const auto random = simulate_random(range);
        const auto model = simulate_model(range);

        doc.fleet.push_back(constant_row("reactive", name, reactive, 0, n_fail, 0.0));
        doc.fleet.push_back(
            constant_row("maximal", name, bound.full, n_fail, 0, n_fail ? config_.rules.window_upper : 0.0));
        doc.fleet.push_back(constant_row("maximal_truncated", name, bound.truncated, bound.truncated_tp, 0,
                                         bound.truncated_mean_dt));
        doc.fleet.push_back(row_of("random", name, random.fleet));
        doc.fleet.push_back(row_of("model", name, model.fleet));

        for (std::size_t t = 0; t < doc.turbines.size(); ++t) {
            const auto& id = doc.turbines[t];
            const auto own = failures_of(failures(), id);
            std::size_t n = 0;
            for (const auto& f : own)
                n += (!f.synthetic && range.contains(f.at)) ? 1 : 0;
            const auto b = maximal_savings(own, range, config_.rules);
            doc.per_turbine.emplace_back(id, constant_row("reactive", name, reactive_cost(own, range), 0, n, 0.0));
            doc.per_turbine.emplace_back(
                id, constant_row("maximal", name, b.full, n, 0, n ? config_.rules.window_upper : 0.0));
            doc.per_turbine.emplace_back(
                id, constant_row("maximal_truncated", name, b.truncated, b.truncated_tp, 0, b.truncated_mean_dt));
            doc.per_turbine.emplace_back(id, row_of("random", name, random.turbines[t]));
            doc.per_turbine.emplace_back(id, row_of("model", name, model.turbines[t]));
        }

        o.files.push_back(out("report_" + name + ".json"));
        write_file_atomic(o.files.back(), report_json(doc));
        o.files.push_back(out("samples_random_" + name + ".csv"));
        write_file_atomic(o.files.back(), samples_csv(random));
        o.files.push_back(out("samples_model_" + name + ".csv"));
        write_file_atomic(o.files.back(), samples_csv(model));

        for (const auto* mc : {&random, &model}) {
            const std::string policy = mc == &random ? "random" : "model";
            histogram_options h;
            h.title = policy + " maintenance, fleet total, " + name;
            h.reactive = reactive.euros();
            h.maximal = bound.full.euros();
            o.files.push_back(out("hist_" + policy + "_" + name + ".svg"));
            write_file_atomic(o.files.back(), emit_histogram(mc->fleet.costs_in_euros(), h));
        }
        for (const auto& r : doc.fleet)
            o.rows.push_back(r);
    }
    return o;
}

} // namespace pmaint
