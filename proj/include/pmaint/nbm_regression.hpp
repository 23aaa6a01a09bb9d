#pragma once

#include "pmaint/fleet_median.hpp"
#include "pmaint/scada_ingest.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pmaint {

inline constexpr seconds default_yearly_period{31557600}; // 365.25 days

/// [cos(2 pi n t / P), sin(2 pi n t / P)] for n = 1..order.
std::vector<double> fourier_features(double t_seconds, int order, double period_seconds);

/// Normal behaviour model of one target sensor: constant level, daily and
/// yearly Fourier terms, and a linear term in every other sensor.
struct seasonal_regression_model {
    std::string target;
    /// Origin of the seasonal time axis.
    timestamp epoch{};
    seconds daily_period = one_day;
    seconds yearly_period = default_yearly_period;
    /// Penalty actually used in the fit.
    double lambda = 0.0;
    double trend = 0.0;
    /// Daily harmonics n = 1..N: cos and sin coefficients.
    std::vector<double> daily_cos;
    std::vector<double> daily_sin;
    std::vector<double> yearly_cos;
    std::vector<double> yearly_sin;
    std::vector<std::string> regressors;
    std::vector<double> weights;

    int daily_order() const { return static_cast<int>(daily_cos.size()); }
    int yearly_order() const { return static_cast<int>(yearly_cos.size()); }

    /// Trend plus both seasonal components at t.
    double baseline(timestamp t) const;
    double daily_component(timestamp t) const;
    double yearly_component(timestamp t) const;
    /// Amplitude of the first daily / yearly harmonic.
    double daily_amplitude() const;
    double yearly_amplitude() const;

    friend bool operator==(const seasonal_regression_model&, const seasonal_regression_model&) = default;
};

struct nbm_fit_options {
    int daily_order = 1;
    int yearly_order = 1;
    seconds daily_period = one_day;
    seconds yearly_period = default_yearly_period;
    /// Ridge strength; unset selects 1e-8 times the mean diagonal of the
    /// normal matrix. The constant term is never penalised.
    std::optional<double> lambda;
    /// Rows outside this range are ignored; unset uses the whole grid.
    std::optional<time_range> fit_range;
    /// Seasonal time origin; unset uses the start of the fit range.
    std::optional<timestamp> epoch;
};

/// Penalised least-squares fit on rows where the target and every regressor
/// are present, using raw (unscaled) values. Throws data_error when fewer
/// complete rows than coefficients exist and singular_error when lambda is 0
/// and the design is rank deficient.
seasonal_regression_model fit_nbm(const sensor_panel& panel, std::string_view turbine, std::string_view target,
                                  const nbm_fit_options& options = {});
seasonal_regression_model fit_nbm(const median_turbine& median, std::string_view target,
                                  const nbm_fit_options& options = {});

/// Prediction per grid index, `missing` wherever the target's regressors
/// are. Throws reference_error if the panel lacks a regressor column.
std::vector<double> predict(const seasonal_regression_model& model, const sensor_panel& panel,
                            std::string_view turbine);

struct residual_series {
    time_grid grid;
    std::string turbine;
    std::vector<double> values;
};

/// Measured minus predicted target.
residual_series residuals(const sensor_panel& panel, std::string_view turbine,
                          const seasonal_regression_model& model);

/// Design matrix row layout shared by the fit and its numerical checks:
/// [1, daily cos/sin pairs, yearly cos/sin pairs, regressors...].
struct design_system {
    std::vector<double> x; // row-major, rows x cols
    std::vector<double> y;
    std::size_t rows = 0;
    std::size_t cols = 0;
};
design_system build_design(const sensor_panel& panel, std::string_view turbine, std::string_view target,
                           const nbm_fit_options& options, timestamp epoch);
/// Coefficient vector in design order.
std::vector<double> coefficients_of(const seasonal_regression_model& model);

struct scan_row {
    int daily_order = 0;
    int yearly_order = 0;
    std::string period;
    double mean = missing;
    double stddev = missing;
    std::size_t count = 0;
    /// Non-empty when the fit failed for this cell.
    std::string error;
};

/// Fits every (daily, yearly) order combination on the median turbine and
/// reports residual mean and population std per evaluation period, pooled
/// over all turbines of `evaluation`. Rows are ordered by input order, then
/// period order. Fit failures are recorded per cell.
std::vector<scan_row> scan_seasonality(const median_turbine& median, std::string_view target,
                                       std::span<const std::pair<int, int>> orders, const nbm_fit_options& base,
                                       const sensor_panel& evaluation, std::span<const period_split> periods);

/// Flat `key = value` document, doubles in shortest round-trip form.
void write_model(std::ostream& out, const seasonal_regression_model& model);
seasonal_regression_model read_model(std::istream& in);

} // namespace pmaint
