#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace pmaint {

using seconds = std::chrono::seconds;
using timestamp = std::chrono::sys_seconds;

inline constexpr seconds one_day{86400};
inline constexpr seconds ten_minutes{600};

inline constexpr seconds days(std::int64_t n) { return seconds{n * 86400}; }

/// Parses an ISO 8601 date or date-time. Accepts `T` or a space as separator,
/// optional seconds, optional fractional seconds (truncated), and an optional
/// `Z` or `+hh:mm` / `-hh:mm` zone suffix. Zone-less values are taken as UTC.
timestamp parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(timestamp t);

/// `YYYY-MM-DD`
std::string format_date(timestamp t);

/// Whole days from `from` to `to`, rounded toward negative infinity.
std::int64_t floor_days(timestamp from, timestamp to);

/// Uniform time axis: start + k * step for k in [0, count).
struct time_grid {
    timestamp start{};
    seconds step{ten_minutes};
    std::size_t count = 0;

    time_grid() = default;
    time_grid(timestamp start_, seconds step_, std::size_t count_);

    timestamp at(std::size_t k) const { return start + step * static_cast<std::int64_t>(k); }
    /// One step past the last grid point.
    timestamp end() const { return at(count); }
    /// First index whose time is >= t, clamped to [0, count].
    std::size_t lower_index(timestamp t) const;
    /// Number of grid steps in `d`; `d` must be a whole multiple of step.
    std::size_t steps_in(seconds d) const;
    std::size_t points_per_day() const { return steps_in(one_day); }

    friend bool operator==(const time_grid&, const time_grid&) = default;
};

/// Half-open interval [begin, end).
struct time_range {
    timestamp begin{};
    timestamp end{};

    bool contains(timestamp t) const { return begin <= t && t < end; }
    std::int64_t whole_days() const { return floor_days(begin, end); }

    friend bool operator==(const time_range&, const time_range&) = default;
};

} // namespace pmaint
