#pragma once

#include "pmaint/config.hpp"
#include "pmaint/fleet_median.hpp"
#include "pmaint/maintenance_policies.hpp"
#include "pmaint/nbm_regression.hpp"
#include "pmaint/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pmaint {

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct stage_output {
    std::vector<std::filesystem::path> files;
    std::vector<report_row> rows;
    std::optional<distribution_moments> moments;
};

/// End-to-end orchestration. Every stage is computed on demand from the
/// config and the input files and cached for the lifetime of the object, so
/// each run_* result depends only on (config, inputs, seed).
class pipeline {
public:
    explicit pipeline(pipeline_config config);

    const pipeline_config& config() const { return config_; }
    void set_seed(std::uint64_t seed) { config_.seed = seed; }
    void set_output(std::filesystem::path dir) { config_.output = std::move(dir); }

    const sensor_panel& panel();
    const std::vector<failure_event>& failures();
    const std::vector<period_split>& periods();
    const period_split& period(std::string_view name);
    const health_mask& mask();
    const median_turbine& median();
    const seasonal_regression_model& model();
    const std::vector<residual_series>& residuals();
    /// Train-period profiles, scored with one synthetic terminal failure per
    /// turbine at the end of train.
    const std::vector<cost_profile>& profiles();
    const threshold_distribution& distribution();

    stage_output run_frankenstein();
    stage_output run_fit();
    stage_output run_scan();
    stage_output run_residuals();
    stage_output run_cusum(std::string_view period, double h);
    stage_output run_profile();
    stage_output run_dist();
    stage_output run_simulate(std::string_view period);
    /// kind: reactive, random or maximal; period "all" iterates the covered
    /// periods.
    stage_output run_baseline(std::string_view kind, std::string_view period);
    stage_output run_report(std::string_view period);

    monte_carlo_result simulate_model(const time_range& period);
    monte_carlo_result simulate_random(const time_range& period);

private:
    std::filesystem::path out(const std::string& name);
    std::vector<std::string> period_names(std::string_view period);

    pipeline_config config_;
    std::optional<sensor_panel> panel_;
    std::optional<std::vector<failure_event>> failures_;
    std::optional<std::vector<period_split>> periods_;
    std::optional<health_mask> mask_;
    std::optional<median_turbine> median_;
    std::optional<seasonal_regression_model> model_;
    std::optional<std::vector<residual_series>> residuals_;
    std::optional<std::vector<cost_profile>> profiles_;
    std::optional<threshold_distribution> dist_;
};

} // namespace pmaint
