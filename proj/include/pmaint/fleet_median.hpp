#pragma once

#include "pmaint/scada_ingest.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pmaint {

/// Per (turbine, grid index) healthy flag.
class health_mask {
public:
    health_mask() = default;
    health_mask(time_grid grid, std::vector<std::string> turbines);

    const time_grid& grid() const { return grid_; }
    const std::vector<std::string>& turbines() const { return turbines_; }

    bool healthy(std::size_t turbine, std::size_t k) const { return flags_[turbine * grid_.count + k] != 0; }
    void mark_unhealthy(std::size_t turbine, std::size_t k) { flags_[turbine * grid_.count + k] = 0; }
    std::size_t unhealthy_count(std::size_t turbine) const;

private:
    time_grid grid_;
    std::vector<std::string> turbines_;
    std::vector<std::uint8_t> flags_;
};

/// Marks [t_f - cut_days, t_f] unhealthy for every real failure (the failure
/// instant included). Synthetic events are ignored. Throws reference_error
/// for a failure on an unknown turbine and range_error for cut_days <= 0.
health_mask build_health_mask(std::span<const failure_event> failures, const time_grid& grid,
                              std::span<const std::string> turbines, int cut_days = 60);

inline const std::string median_turbine_id = "FRANKENSTEIN";

/// Healthy reference turbine: per-timestamp median of each sensor over the
/// turbines healthy at that time.
struct median_turbine {
    time_grid grid;
    std::vector<std::string> sensors;
    /// sensor-major, `sensors.size() * grid.count`
    std::vector<double> values;
    /// Healthy turbines per grid index.
    std::vector<std::uint32_t> coverage;

    std::span<const double> series(std::size_t sensor) const {
        return {values.data() + sensor * grid.count, grid.count};
    }
    std::size_t sensor_index(std::string_view name) const;

    /// Single-turbine panel with id FRANKENSTEIN.
    sensor_panel as_panel() const;
};

/// Median of the values (even count: mean of the middle pair). Reorders the
/// input. Returns `missing` for an empty input.
double median_of(std::span<double> values);

median_turbine build_median_turbine(const sensor_panel& panel, const health_mask& mask);

/// Appends one synthetic terminal failure per turbine at `period.end`, with
/// zero TP reward, zero FN cost and the default FP cost.
std::vector<failure_event> append_terminal_failure(std::vector<failure_event> failures,
                                                   std::span<const std::string> turbines, const time_range& period,
                                                   money fp_cost = money::from_euros(2000));

} // namespace pmaint
