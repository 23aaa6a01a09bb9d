#pragma once

#include "pmaint/money.hpp"
#include "pmaint/time.hpp"

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmaint {

/// Marker for a missing sensor value. Missing values propagate; nothing in
/// the library imputes them.
inline constexpr double missing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Aligned (turbine x sensor x grid index) matrix of optional readings.
class sensor_panel {
public:
    sensor_panel() = default;
    /// All values start missing. Throws reference_error on duplicate names.
    sensor_panel(time_grid grid, std::vector<std::string> turbines, std::vector<std::string> sensors);

    const time_grid& grid() const { return grid_; }
    const std::vector<std::string>& turbines() const { return turbines_; }
    const std::vector<std::string>& sensors() const { return sensors_; }

    std::size_t turbine_index(std::string_view turbine) const;
    std::size_t sensor_index(std::string_view sensor) const;
    bool has_turbine(std::string_view turbine) const;
    bool has_sensor(std::string_view sensor) const;

    std::span<const double> series(std::size_t turbine, std::size_t sensor) const;
    std::span<double> series(std::size_t turbine, std::size_t sensor);
    std::span<const double> series(std::string_view turbine, std::string_view sensor) const {
        return series(turbine_index(turbine), sensor_index(sensor));
    }

    double value(std::size_t turbine, std::size_t sensor, std::size_t k) const {
        return values_[offset(turbine, sensor) + k];
    }
    void set(std::size_t turbine, std::size_t sensor, std::size_t k, double v) {
        values_[offset(turbine, sensor) + k] = v;
    }

    /// Bitwise equality of layout and values (missing compares equal to missing).
    friend bool operator==(const sensor_panel& a, const sensor_panel& b);

private:
    std::size_t offset(std::size_t turbine, std::size_t sensor) const {
        return (turbine * sensors_.size() + sensor) * grid_.count;
    }

    time_grid grid_;
    std::vector<std::string> turbines_;
    std::vector<std::string> sensors_;
    std::vector<double> values_;
};

/// Maps CSV headers onto panel roles. An empty sensor list selects every
/// column other than the timestamp and turbine columns.
struct column_map {
    std::string timestamp = "Timestamp";
    std::string turbine = "Turbine_ID";
    std::vector<std::string> sensors;
    seconds step = ten_minutes;
};

/// Reads a long-format SCADA CSV (one row per turbine and timestamp).
///
/// The grid is anchored on multiples of `map.step` since the Unix epoch.
/// Timestamps off the grid snap to the nearest grid point when strictly
/// closer than step/2; an exact half-step offset is ambiguous and rejected.
/// Per turbine, timestamps must be non-decreasing in file order; a repeated
/// (turbine, grid point) keeps the last row.
///
/// Throws parse_error for malformed rows (with line number) and
/// alignment_error for ordering or snapping failures.
sensor_panel parse_scada(std::istream& in, const column_map& map = {});
sensor_panel parse_scada_file(const std::string& path, const column_map& map = {});

/// Writes every (turbine, grid point) as one row; missing cells are empty.
void write_scada(std::ostream& out, const sensor_panel& panel, const column_map& map = {});

/// Copy of `panel` without the named sensors. Throws reference_error when a
/// name is not in the panel.
sensor_panel drop_dead_sensors(const sensor_panel& panel, std::span<const std::string> names);

struct failure_event {
    std::string turbine;
    timestamp at{};
    std::string component;
    std::string remarks;
    money tp_reward_rate = money::from_euros(17000);
    money fn_cost = money::from_euros(20000);
    money fp_cost = money::from_euros(2000);
    /// Terminal placeholder event: earns nothing as TP, costs nothing as FN.
    bool synthetic = false;
};

/// Cost fields given to events whose CSV row has no override.
struct failure_costs {
    money tp_reward_rate = money::from_euros(17000);
    money fn_cost = money::from_euros(20000);
    money fp_cost = money::from_euros(2000);
};

/// Reads `timestamp,turbine,component,remarks` (columns located by header;
/// optional `tp_reward_rate`, `fn_cost`, `fp_cost`, `synthetic` columns
/// override the defaults). Result is sorted by (timestamp, turbine).
/// When `known_turbines` is non-empty, an unlisted turbine raises
/// reference_error.
std::vector<failure_event> parse_failures(std::istream& in, std::span<const std::string> known_turbines = {},
                                          const failure_costs& defaults = {});
std::vector<failure_event> parse_failures_file(const std::string& path,
                                               std::span<const std::string> known_turbines = {},
                                               const failure_costs& defaults = {});
void write_failures(std::ostream& out, std::span<const failure_event> failures);

/// Failures of one turbine, preserving order.
std::vector<failure_event> failures_of(std::span<const failure_event> failures, std::string_view turbine);

struct period_split {
    std::string name;
    time_range range;
};

/// Boundaries of the train / test1 / test2 evaluation periods. test1+2 is
/// [test1_begin, end).
struct period_boundaries {
    timestamp train_begin = parse_timestamp("2016-01-01");
    timestamp test1_begin = parse_timestamp("2017-01-01");
    timestamp test2_begin = parse_timestamp("2017-09-01");
    timestamp end = parse_timestamp("2018-01-01");
};

/// Named periods fully covered by `grid`, in the order train, test1, test2,
/// test1+2. Throws range_error if not even the train period fits.
std::vector<period_split> split_periods(const time_grid& grid, const period_boundaries& bounds = {});

/// Looks up a period by name; throws range_error if it is not defined.
const period_split& find_period(std::span<const period_split> periods, std::string_view name);

} // namespace pmaint
