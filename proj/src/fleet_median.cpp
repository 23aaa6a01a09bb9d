#include "pmaint/fleet_median.hpp"

#include "pmaint/errors.hpp"

#include <algorithm>

namespace pmaint {

health_mask::health_mask(time_grid grid, std::vector<std::string> turbines)
    : grid_(grid), turbines_(std::move(turbines)), flags_(turbines_.size() * grid_.count, 1) {}

std::size_t health_mask::unhealthy_count(std::size_t turbine) const {
    const auto first = flags_.begin() + static_cast<std::ptrdiff_t>(turbine * grid_.count);
    return static_cast<std::size_t>(std::count(first, first + static_cast<std::ptrdiff_t>(grid_.count), 0));
}

health_mask build_health_mask(std::span<const failure_event> failures, const time_grid& grid,
                              std::span<const std::string> turbines, int cut_days) {
    if (cut_days <= 0)
        throw range_error("cut_days must be positive");
    health_mask mask(grid, {turbines.begin(), turbines.end()});
    for (const auto& f : failures) {
        if (f.synthetic)
            continue;
        const auto it = std::find(turbines.begin(), turbines.end(), f.turbine);
        if (it == turbines.end())
            throw reference_error("failure references unknown turbine '" + f.turbine + "'");
        const auto t = static_cast<std::size_t>(it - turbines.begin());
        const auto first = grid.lower_index(f.at - days(cut_days));
        // inclusive of the failure instant: every grid point with time <= t_f
        const auto last = grid.lower_index(f.at + seconds{1});
        for (std::size_t k = first; k < last; ++k)
            mask.mark_unhealthy(t, k);
    }
    return mask;
}

std::size_t median_turbine::sensor_index(std::string_view name) const {
    const auto it = std::find(sensors.begin(), sensors.end(), name);
    if (it == sensors.end())
        throw reference_error("median turbine has no sensor '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - sensors.begin());
}

sensor_panel median_turbine::as_panel() const {
    sensor_panel panel(grid, {median_turbine_id}, sensors);
    for (std::size_t s = 0; s < sensors.size(); ++s) {
        const auto src = series(s);
        std::copy(src.begin(), src.end(), panel.series(0, s).begin());
    }
    return panel;
}

double median_of(std::span<double> v) {
    if (v.empty())
        return missing;
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1)
        return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return lower + (upper - lower) / 2.0;
}

median_turbine build_median_turbine(const sensor_panel& panel, const health_mask& mask) {
    if (!(panel.grid() == mask.grid()) || panel.turbines() != mask.turbines())
        throw reference_error("panel and health mask disagree on grid or turbines");
    const auto& grid = panel.grid();
    const auto n_turbines = panel.turbines().size();
    const auto n_sensors = panel.sensors().size();

    median_turbine out;
    out.grid = grid;
    out.sensors = panel.sensors();
    out.values.assign(n_sensors * grid.count, missing);
    out.coverage.assign(grid.count, 0);

    std::vector<double> scratch;
    scratch.reserve(n_turbines);
    for (std::size_t k = 0; k < grid.count; ++k) {
        std::uint32_t healthy = 0;
        for (std::size_t t = 0; t < n_turbines; ++t)
            healthy += mask.healthy(t, k) ? 1 : 0;
        out.coverage[k] = healthy;
        if (healthy == 0)
            continue;
        for (std::size_t s = 0; s < n_sensors; ++s) {
            scratch.clear();
            for (std::size_t t = 0; t < n_turbines; ++t) {
                if (!mask.healthy(t, k))
                    continue;
                const double v = panel.value(t, s, k);
                if (!is_missing(v))
                    scratch.push_back(v);
            }
            out.values[s * grid.count + k] = median_of(scratch);
        }
    }
    return out;
}

std::vector<failure_event> append_terminal_failure(std::vector<failure_event> failures,
                                                   std::span<const std::string> turbines, const time_range& period,
                                                   money fp_cost) {
    if (!(period.begin < period.end))
        throw range_error("period must satisfy begin < end");
    for (const auto& t : turbines) {
        failure_event ev;
        ev.turbine = t;
        ev.at = period.end;
        ev.component = "terminal";
        ev.remarks = "end of period";
        ev.tp_reward_rate = money{};
        ev.fn_cost = money{};
        ev.fp_cost = fp_cost;
        ev.synthetic = true;
        failures.push_back(std::move(ev));
    }
    return failures;
}

} // namespace pmaint
