// pmaint command-line front end. Talks to the library only through the C API.

#include "pmaint/pmaint.h"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <memory>
#include <string>

namespace {

int exit_code(pm_status s) {
    switch (s) {
    case PM_OK: return 0;
    case PM_ERR_CONFIG:
    case PM_ERR_INVALID_ARGUMENT: return 2;
    case PM_ERR_INTERNAL: return 1;
    default: return 3;
    }
}

int report_failure(pm_status s) {
    std::fprintf(stderr, "pmaint: %s: %s\n", pm_status_name(s), pm_last_error());
    return exit_code(s);
}

void print_rows(const pm_pipeline* p) {
    const auto n = pm_pipeline_row_count(p);
    if (!n)
        return;
    std::printf("%-18s %-8s %10s %10s %10s %8s %5s %5s %5s\n", "policy", "period", "mean", "std", "min", "mean_dt",
                "n_tp", "n_fp", "n_fn");
    for (size_t i = 0; i < n; ++i) {
        pm_row r;
        if (pm_pipeline_row(p, i, &r) != PM_OK)
            continue;
        std::printf("%-18s %-8s %10.0f %10.0f %10.0f %8.2f %5zu %5zu %5zu\n", r.policy, r.period, r.stats.mean,
                    r.stats.stddev, r.stats.min, r.mean_dt, r.n_tp, r.n_fp, r.n_fn);
    }
}

void print_outputs(const pm_pipeline* p) {
    for (size_t i = 0; i < pm_pipeline_output_count(p); ++i)
        std::printf("wrote %s\n", pm_pipeline_output(p, i));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-optimised probabilistic maintenance pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pm_version()));

    std::string config;
    std::string out_dir;
    std::string period = "test1+2";
    std::string kind;
    uint64_t seed = 0;
    double h = 0.0;

    app.add_option("--config", config, "pipeline config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");

    const std::vector<std::string> periods{"train", "test1", "test2", "test1+2"};
    std::vector<std::string> periods_all = periods;
    periods_all.push_back("all");

    auto* frank = app.add_subcommand("frankenstein", "health mask and median turbine");
    auto* fit = app.add_subcommand("fit", "fit the normal behaviour model");
    auto* scan = app.add_subcommand("scan", "seasonality order scan");
    auto* resid = app.add_subcommand("residuals", "per-turbine residuals and stability check");
    auto* cusum = app.add_subcommand("cusum", "CUSUM traces at one threshold");
    cusum->set_help_flag("--help", "Print this help message and exit"); // frees -h for the threshold
    cusum->add_option("--h", h, "alarm threshold")->required()->check(CLI::PositiveNumber);
    cusum->add_option("--period", period, "evaluation period")->check(CLI::IsMember(periods));
    auto* profile = app.add_subcommand("profile", "train-period cost profiles");
    auto* dist = app.add_subcommand("dist", "threshold distribution P(h)");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the model policy");
    sim->add_option("--period", period, "evaluation period")->check(CLI::IsMember(periods_all));
    auto* base = app.add_subcommand("baseline", "reactive, random or maximal baseline");
    base->add_option("kind", kind, "reactive|random|maximal")
        ->required()
        ->check(CLI::IsMember({"reactive", "random", "maximal"}));
    base->add_option("--period", period, "evaluation period")->check(CLI::IsMember(periods_all));
    auto* rep = app.add_subcommand("report", "comparison table and histograms");
    rep->add_option("--period", period, "evaluation period")->check(CLI::IsMember(periods_all));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    pm_pipeline* raw = nullptr;
    if (const auto s = pm_pipeline_open(config.c_str(), &raw); s != PM_OK)
        return report_failure(s);
    std::unique_ptr<pm_pipeline, decltype(&pm_pipeline_close)> p(raw, pm_pipeline_close);
    if (*seed_opt)
        pm_pipeline_set_seed(p.get(), seed);
    if (!out_dir.empty())
        pm_pipeline_set_output(p.get(), out_dir.c_str());

    pm_status s = PM_OK;
    if (*frank)
        s = pm_run_frankenstein(p.get());
    else if (*fit)
        s = pm_run_fit(p.get());
    else if (*scan)
        s = pm_run_scan(p.get());
    else if (*resid)
        s = pm_run_residuals(p.get());
    else if (*cusum)
        s = pm_run_cusum(p.get(), period.c_str(), h);
    else if (*profile)
        s = pm_run_profile(p.get());
    else if (*dist)
        s = pm_run_dist(p.get());
    else if (*sim)
        s = pm_run_simulate(p.get(), period.c_str());
    else if (*base)
        s = pm_run_baseline(p.get(), kind.c_str(), period.c_str());
    else if (*rep)
        s = pm_run_report(p.get(), period.c_str());
    if (s != PM_OK)
        return report_failure(s);

    print_outputs(p.get());
    if (*dist) {
        double mean = 0.0, sd = 0.0;
        if (pm_pipeline_moments(p.get(), &mean, &sd) == PM_OK)
            std::printf("<h> = %.2f  std = %.2f  detection(10/step) = %.2f days  minimal 60-day shift = %.4f\n", mean,
                        sd, pm_detection_days(mean, 10.0, 144.0), pm_minimal_shift(mean, 60.0, 144.0));
    }
    print_rows(p.get());
    std::printf("seed %" PRIu64 "\n", pm_pipeline_seed(p.get()));
    return 0;
}
