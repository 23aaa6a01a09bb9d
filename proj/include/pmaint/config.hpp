#pragma once

#include "pmaint/change_detection.hpp"
#include "pmaint/cost_model.hpp"
#include "pmaint/scada_ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pmaint {

struct pipeline_config {
    std::filesystem::path scada;
    std::filesystem::path failures;
    std::filesystem::path output = "out";

    column_map columns;
    std::string target = "Hyd_Oil_Temp_Avg";
    std::vector<std::string> dead_sensors{"Prod_LatestAvg_ActPwrGen2", "Prod_LatestAvg_ReactPwrGen2"};
    /// Keep only failures of these components; empty keeps all.
    std::vector<std::string> failure_components;
    period_boundaries periods;
    int cut_days = 60;

    int daily_order = 1;
    int yearly_order = 1;
    std::optional<double> lambda;
    std::vector<std::pair<int, int>> scan_orders{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 3}};

    cusum_options cusum;
    int window_days = 30;
    int reference_days = 3;

    cost_rules rules;
    money cap = money::from_euros(20000);

    double h_min = 100.0;
    double h_max = 150000.0;
    double h_step = 100.0;

    std::size_t n_samples = 10000;
    std::uint64_t seed = 20240601;
    std::size_t n_dates = 12;
    /// Charge random inspections that repeat inside an already found window.
    bool charge_repeat_inspections = false;
    /// Inspection sampling span; unset is [train begin, end).
    std::optional<time_range> inspection_span;

    time_range span() const { return inspection_span.value_or(time_range{periods.train_begin, periods.end}); }
    failure_costs event_costs() const { return {rules.tp_rate, rules.fn_cost, rules.fp_cost}; }
};

/// Parses the JSON config. Relative input and output paths resolve against
/// the config file's directory. Unknown keys, wrong types and out-of-range
/// values raise config_error; so do input files that do not exist.
pipeline_config load_config(const std::filesystem::path& path);
pipeline_config parse_config(const std::string& text, const std::filesystem::path& base_dir);

} // namespace pmaint
