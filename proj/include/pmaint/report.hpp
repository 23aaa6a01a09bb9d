#pragma once

#include "pmaint/maintenance_policies.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pmaint {

struct histogram_options {
    std::string title;
    /// Dashed vertical line; missing hides it.
    double reactive = missing;
    /// Dotted vertical line; missing hides it.
    double maximal = missing;
    /// 0 selects ceil(sqrt(n)).
    std::size_t bins = 0;
    double width = 640.0;
    double height = 360.0;
};

struct histogram_bins {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
};

/// Bin layout used by emit_histogram. The x-range covers the samples and
/// both reference lines; a degenerate range is widened to one unit.
histogram_bins bin_samples(std::span<const double> samples, const histogram_options& options);

/// Self-contained SVG histogram with a triangle marker at the sample mean.
/// Throws data_error on empty input.
std::string emit_histogram(std::span<const double> samples, const histogram_options& options);

/// One line of the policy comparison table. mean_dt and the counts come
/// from the cheapest sample.
struct report_row {
    std::string policy;
    std::string period;
    summary_stats stats;
    double mean_dt = 0.0;
    std::size_t n_tp = 0;
    std::size_t n_fp = 0;
    std::size_t n_fn = 0;
};

report_row row_of(std::string policy, std::string period, const cost_distribution& dist);
/// Deterministic policy (reactive, maximal): one value, zero spread.
report_row constant_row(std::string policy, std::string period, money cost, std::size_t n_tp, std::size_t n_fn,
                        double mean_dt);

struct report_document {
    std::string period;
    timestamp begin{};
    timestamp end{};
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::vector<std::string> turbines;
    std::vector<report_row> fleet;
    /// (turbine, row) pairs.
    std::vector<std::pair<std::string, report_row>> per_turbine;
};

/// JSON text, keys in fixed order, money in whole euros.
std::string report_json(const report_document& doc);

} // namespace pmaint
