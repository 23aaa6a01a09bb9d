// Synthetic SCADA-like data for tests: a seasonal ambient temperature and a
// wind speed drive a hydraulic oil temperature, with optional injected mean
// shifts. Everything is a pure function of its inputs, seed included.
#pragma once

#include "pmaint/scada_ingest.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace synth {

using pmaint::timestamp;

struct shift {
    std::string turbine;
    timestamp from{};
    double delta = 0.0;
    std::optional<timestamp> until;
};

struct spec {
    timestamp start = pmaint::parse_timestamp("2016-01-01");
    int days = 30;
    std::vector<std::string> turbines{"T01", "T06", "T07"};
    std::string target = "Hyd_Oil_Temp_Avg";
    double noise = 0.3;
    /// Fraction of target cells left missing.
    double missing_fraction = 0.0;
    std::vector<shift> shifts;
    std::uint64_t seed = 7;
    /// Extra sensors that never carry data.
    std::vector<std::string> dead;
};

// true coefficients of the generated target
inline constexpr double level = 20.0;
inline constexpr double w_amb = 1.0;
inline constexpr double w_wind = 0.5;
inline constexpr double daily_amp = 2.0;

inline double ambient(double t) {
    const double year = 31557600.0;
    return 12.0 + 8.0 * std::sin(2 * std::numbers::pi * t / year) + 3.0 * std::sin(2 * std::numbers::pi * t / 86400.0 + 1.0);
}

inline double wind(double t, double u) {
    return 7.0 + 2.0 * std::cos(2 * std::numbers::pi * t / 86400.0) + u;
}

inline pmaint::sensor_panel make_panel(const spec& s) {
    const auto n = static_cast<std::size_t>(s.days) * 144;
    std::vector<std::string> sensors{"Amb_Temp_Avg", "Wind_Speed_Avg", s.target};
    sensors.insert(sensors.end(), s.dead.begin(), s.dead.end());
    pmaint::sensor_panel p(pmaint::time_grid(s.start, pmaint::ten_minutes, n), s.turbines, sensors);
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t ti = 0; ti < s.turbines.size(); ++ti) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto at = p.grid().at(k);
            const double t = static_cast<double>(at.time_since_epoch().count());
            // turbine-specific wiggles keep the regressors from being collinear
            const double amb = ambient(t) + 0.5 * gauss(rng);
            const double wnd = wind(t, 1.5 * gauss(rng));
            double y = level + w_amb * amb + w_wind * wnd +
                       daily_amp * std::cos(2 * std::numbers::pi * (t - static_cast<double>(s.start.time_since_epoch().count())) / 86400.0) +
                       s.noise * gauss(rng);
            for (const auto& sh : s.shifts)
                if (sh.turbine == s.turbines[ti] && at >= sh.from && (!sh.until || at < *sh.until))
                    y += sh.delta;
            p.set(ti, 0, k, amb);
            p.set(ti, 1, k, wnd);
            p.set(ti, 2, k, unif(rng) < s.missing_fraction ? pmaint::missing : y);
        }
    }
    return p;
}

inline pmaint::failure_event failure(std::string turbine, timestamp at, std::string component = "HYDRAULIC_GROUP") {
    pmaint::failure_event f;
    f.turbine = std::move(turbine);
    f.at = at;
    f.component = std::move(component);
    f.remarks = "synthetic";
    return f;
}

} // namespace synth
