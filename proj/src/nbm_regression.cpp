#include "pmaint/nbm_regression.hpp"

#include "pmaint/csv.hpp"
#include "pmaint/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

namespace pmaint {

namespace {

double elapsed(timestamp t, timestamp epoch) {
    return static_cast<double>((t - epoch).count());
}

double harmonic_sum(const std::vector<double>& cos_c, const std::vector<double>& sin_c, double t, double period) {
    double sum = 0.0;
    for (std::size_t n = 1; n <= cos_c.size(); ++n) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n) * t / period;
        sum += cos_c[n - 1] * std::cos(phase) + sin_c[n - 1] * std::sin(phase);
    }
    return sum;
}

std::vector<std::string> regressors_for(const sensor_panel& panel, std::string_view target) {
    std::vector<std::string> out;
    for (const auto& s : panel.sensors())
        if (s != target)
            out.push_back(s);
    return out;
}

} // namespace

std::vector<double> fourier_features(double t_seconds, int order, double period_seconds) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * std::max(order, 0)));
    for (int n = 1; n <= order; ++n) {
        const double phase = 2.0 * std::numbers::pi * n * t_seconds / period_seconds;
        out.push_back(std::cos(phase));
        out.push_back(std::sin(phase));
    }
    return out;
}

double seasonal_regression_model::daily_component(timestamp t) const {
    return harmonic_sum(daily_cos, daily_sin, elapsed(t, epoch), static_cast<double>(daily_period.count()));
}

double seasonal_regression_model::yearly_component(timestamp t) const {
    return harmonic_sum(yearly_cos, yearly_sin, elapsed(t, epoch), static_cast<double>(yearly_period.count()));
}

double seasonal_regression_model::baseline(timestamp t) const {
    return trend + daily_component(t) + yearly_component(t);
}

double seasonal_regression_model::daily_amplitude() const {
    return daily_cos.empty() ? 0.0 : std::hypot(daily_cos[0], daily_sin[0]);
}

double seasonal_regression_model::yearly_amplitude() const {
    return yearly_cos.empty() ? 0.0 : std::hypot(yearly_cos[0], yearly_sin[0]);
}

design_system build_design(const sensor_panel& panel, std::string_view turbine, std::string_view target,
                           const nbm_fit_options& options, timestamp epoch) {
    if (options.daily_order < 0 || options.yearly_order < 0)
        throw range_error("seasonality orders must be non-negative");
    const auto t_idx = panel.turbine_index(turbine);
    const auto y_series = panel.series(t_idx, panel.sensor_index(target));
    const auto regressors = regressors_for(panel, target);
    std::vector<std::span<const double>> reg_series;
    for (const auto& r : regressors)
        reg_series.push_back(panel.series(t_idx, panel.sensor_index(r)));

    const auto& grid = panel.grid();
    std::size_t k_begin = 0, k_end = grid.count;
    if (options.fit_range) {
        k_begin = grid.lower_index(options.fit_range->begin);
        k_end = grid.lower_index(options.fit_range->end);
    }

    design_system sys;
    sys.cols = 1 + 2 * static_cast<std::size_t>(options.daily_order + options.yearly_order) + regressors.size();
    const double pd = static_cast<double>(options.daily_period.count());
    const double py = static_cast<double>(options.yearly_period.count());
    for (std::size_t k = k_begin; k < k_end; ++k) {
        const double y = y_series[k];
        if (is_missing(y))
            continue;
        bool complete = true;
        for (const auto& r : reg_series)
            if (is_missing(r[k])) {
                complete = false;
                break;
            }
        if (!complete)
            continue;
        const double t = elapsed(grid.at(k), epoch);
        sys.x.push_back(1.0);
        for (double f : fourier_features(t, options.daily_order, pd))
            sys.x.push_back(f);
        for (double f : fourier_features(t, options.yearly_order, py))
            sys.x.push_back(f);
        for (const auto& r : reg_series)
            sys.x.push_back(r[k]);
        sys.y.push_back(y);
        ++sys.rows;
    }
    return sys;
}

std::vector<double> coefficients_of(const seasonal_regression_model& m) {
    std::vector<double> c{m.trend};
    for (int n = 0; n < m.daily_order(); ++n) {
        c.push_back(m.daily_cos[n]);
        c.push_back(m.daily_sin[n]);
    }
    for (int n = 0; n < m.yearly_order(); ++n) {
        c.push_back(m.yearly_cos[n]);
        c.push_back(m.yearly_sin[n]);
    }
    c.insert(c.end(), m.weights.begin(), m.weights.end());
    return c;
}

seasonal_regression_model fit_nbm(const sensor_panel& panel, std::string_view turbine, std::string_view target,
                                  const nbm_fit_options& options) {
    panel.sensor_index(target);
    const timestamp epoch =
        options.epoch ? *options.epoch : (options.fit_range ? options.fit_range->begin : panel.grid().start);
    const auto sys = build_design(panel, turbine, target, options, epoch);
    const auto p = sys.cols;
    if (sys.rows < p)
        throw data_error("NBM fit needs at least " + std::to_string(p) + " complete rows, found " +
                         std::to_string(sys.rows));

    using matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const matrix> x(sys.x.data(), static_cast<Eigen::Index>(sys.rows), static_cast<Eigen::Index>(p));
    const Eigen::Map<const Eigen::VectorXd> y(sys.y.data(), static_cast<Eigen::Index>(sys.rows));

    double lambda = 0.0;
    if (options.lambda) {
        lambda = *options.lambda;
        if (!(lambda >= 0.0))
            throw range_error("lambda must be non-negative");
    } else {
        lambda = 1e-8 * x.colwise().squaredNorm().mean();
    }

    Eigen::VectorXd theta;
    const auto penalised = static_cast<Eigen::Index>(p - 1);
    if (lambda > 0.0 && penalised > 0) {
        // augmented system [X; sqrt(lambda) D] theta = [y; 0], D skips the constant
        matrix a = matrix::Zero(x.rows() + penalised, static_cast<Eigen::Index>(p));
        a.topRows(x.rows()) = x;
        const double root = std::sqrt(lambda);
        for (Eigen::Index j = 0; j < penalised; ++j)
            a(x.rows() + j, j + 1) = root;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
        b.head(x.rows()) = y;
        const Eigen::ColPivHouseholderQR<matrix> qr(a);
        theta = qr.solve(b);
    } else {
        const Eigen::ColPivHouseholderQR<matrix> qr(x);
        if (qr.rank() < static_cast<Eigen::Index>(p))
            throw singular_error("NBM design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                                 std::to_string(p) + "); use lambda > 0");
        theta = qr.solve(y);
    }
    if (!theta.allFinite())
        throw singular_error("NBM fit produced non-finite coefficients; increase lambda");

    seasonal_regression_model m;
    m.target = std::string(target);
    m.epoch = epoch;
    m.daily_period = options.daily_period;
    m.yearly_period = options.yearly_period;
    m.lambda = lambda;
    Eigen::Index j = 0;
    m.trend = theta(j++);
    for (int n = 0; n < options.daily_order; ++n) {
        m.daily_cos.push_back(theta(j++));
        m.daily_sin.push_back(theta(j++));
    }
    for (int n = 0; n < options.yearly_order; ++n) {
        m.yearly_cos.push_back(theta(j++));
        m.yearly_sin.push_back(theta(j++));
    }
    m.regressors = regressors_for(panel, target);
    for (std::size_t r = 0; r < m.regressors.size(); ++r)
        m.weights.push_back(theta(j++));
    return m;
}

seasonal_regression_model fit_nbm(const median_turbine& median, std::string_view target,
                                  const nbm_fit_options& options) {
    return fit_nbm(median.as_panel(), median_turbine_id, target, options);
}

std::vector<double> predict(const seasonal_regression_model& model, const sensor_panel& panel,
                            std::string_view turbine) {
    const auto t_idx = panel.turbine_index(turbine);
    std::vector<std::span<const double>> reg;
    for (const auto& r : model.regressors) {
        if (!panel.has_sensor(r))
            throw reference_error("panel lacks regressor column '" + r + "'");
        reg.push_back(panel.series(t_idx, panel.sensor_index(r)));
    }
    const auto& grid = panel.grid();
    std::vector<double> out(grid.count, missing);
    for (std::size_t k = 0; k < grid.count; ++k) {
        double v = model.baseline(grid.at(k));
        bool complete = true;
        for (std::size_t r = 0; r < reg.size(); ++r) {
            const double x = reg[r][k];
            if (is_missing(x)) {
                complete = false;
                break;
            }
            v += model.weights[r] * x;
        }
        if (complete)
            out[k] = v;
    }
    return out;
}

residual_series residuals(const sensor_panel& panel, std::string_view turbine,
                          const seasonal_regression_model& model) {
    const auto pred = predict(model, panel, turbine);
    const auto y = panel.series(panel.turbine_index(turbine), panel.sensor_index(model.target));
    residual_series out{panel.grid(), std::string(turbine), std::vector<double>(pred.size(), missing)};
    for (std::size_t k = 0; k < pred.size(); ++k)
        if (!is_missing(y[k]) && !is_missing(pred[k]))
            out.values[k] = y[k] - pred[k];
    return out;
}

std::vector<scan_row> scan_seasonality(const median_turbine& median, std::string_view target,
                                       std::span<const std::pair<int, int>> orders, const nbm_fit_options& base,
                                       const sensor_panel& evaluation, std::span<const period_split> periods) {
    const auto median_panel = median.as_panel();
    std::vector<scan_row> rows;
    for (const auto& [dd, yy] : orders) {
        nbm_fit_options opt = base;
        opt.daily_order = dd;
        opt.yearly_order = yy;
        std::optional<seasonal_regression_model> model;
        std::string err;
        try {
            model = fit_nbm(median_panel, median_turbine_id, target, opt);
        } catch (const error& e) {
            err = e.what();
        }
        std::vector<residual_series> res;
        if (model)
            for (const auto& t : evaluation.turbines())
                res.push_back(residuals(evaluation, t, *model));
        for (const auto& period : periods) {
            scan_row row;
            row.daily_order = dd;
            row.yearly_order = yy;
            row.period = period.name;
            row.error = err;
            if (model) {
                const auto& grid = evaluation.grid();
                const auto k0 = grid.lower_index(period.range.begin);
                const auto k1 = grid.lower_index(period.range.end);
                double sum = 0.0, sq = 0.0;
                std::size_t n = 0;
                for (const auto& r : res)
                    for (std::size_t k = k0; k < k1; ++k)
                        if (!is_missing(r.values[k])) {
                            sum += r.values[k];
                            ++n;
                        }
                if (n > 0) {
                    const double mean = sum / static_cast<double>(n);
                    for (const auto& r : res)
                        for (std::size_t k = k0; k < k1; ++k)
                            if (!is_missing(r.values[k]))
                                sq += (r.values[k] - mean) * (r.values[k] - mean);
                    row.mean = mean;
                    row.stddev = std::sqrt(sq / static_cast<double>(n));
                }
                row.count = n;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_model(std::ostream& out, const seasonal_regression_model& m) {
    auto num = [](double v) { return csv::format_number(v); };
    out << "# normal behaviour model\n";
    out << "format = pmaint-nbm/1\n";
    out << "target = " << m.target << '\n';
    out << "epoch = " << format_timestamp(m.epoch) << '\n';
    out << "daily_order = " << m.daily_order() << '\n';
    out << "yearly_order = " << m.yearly_order() << '\n';
    out << "daily_period_s = " << m.daily_period.count() << '\n';
    out << "yearly_period_s = " << m.yearly_period.count() << '\n';
    out << "lambda = " << num(m.lambda) << '\n';
    out << "trend = " << num(m.trend) << '\n';
    for (int n = 0; n < m.daily_order(); ++n) {
        out << "daily." << n + 1 << ".cos = " << num(m.daily_cos[n]) << '\n';
        out << "daily." << n + 1 << ".sin = " << num(m.daily_sin[n]) << '\n';
    }
    for (int n = 0; n < m.yearly_order(); ++n) {
        out << "yearly." << n + 1 << ".cos = " << num(m.yearly_cos[n]) << '\n';
        out << "yearly." << n + 1 << ".sin = " << num(m.yearly_sin[n]) << '\n';
    }
    for (std::size_t r = 0; r < m.regressors.size(); ++r)
        out << "beta." << m.regressors[r] << " = " << num(m.weights[r]) << '\n';
}

seasonal_regression_model read_model(std::istream& in) {
    seasonal_regression_model m;
    std::string line;
    std::size_t line_no = 0;
    int daily = -1, yearly = -1;
    bool saw_format = false;
    auto number = [&](const std::string& v) {
        const auto d = csv::parse_number(v);
        if (!d)
            throw parse_error("empty numeric value in model", line_no);
        return *d;
    };
    auto harmonic = [&](std::vector<double>& dst, const std::string& key, std::size_t prefix, int order,
                        const std::string& v) {
        const auto dot = key.find('.', prefix);
        const int n = std::stoi(key.substr(prefix, dot - prefix));
        if (order < 0 || n < 1 || n > order)
            throw parse_error("harmonic index out of range in '" + key + "'", line_no);
        dst[static_cast<std::size_t>(n - 1)] = number(v);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw parse_error("expected 'key = value'", line_no);
        const auto key = line.substr(0, eq);
        const auto val = line.substr(eq + 3);
        try {
            if (key == "format") {
                if (val != "pmaint-nbm/1")
                    throw parse_error("unsupported model format '" + val + "'", line_no);
                saw_format = true;
            } else if (key == "target") {
                m.target = val;
            } else if (key == "epoch") {
                m.epoch = parse_timestamp(val);
            } else if (key == "daily_order") {
                daily = std::stoi(val);
                m.daily_cos.assign(static_cast<std::size_t>(daily), 0.0);
                m.daily_sin.assign(static_cast<std::size_t>(daily), 0.0);
            } else if (key == "yearly_order") {
                yearly = std::stoi(val);
                m.yearly_cos.assign(static_cast<std::size_t>(yearly), 0.0);
                m.yearly_sin.assign(static_cast<std::size_t>(yearly), 0.0);
            } else if (key == "daily_period_s") {
                m.daily_period = seconds{std::stoll(val)};
            } else if (key == "yearly_period_s") {
                m.yearly_period = seconds{std::stoll(val)};
            } else if (key == "lambda") {
                m.lambda = number(val);
            } else if (key == "trend") {
                m.trend = number(val);
            } else if (key.rfind("daily.", 0) == 0) {
                harmonic(key.ends_with(".cos") ? m.daily_cos : m.daily_sin, key, 6, daily, val);
            } else if (key.rfind("yearly.", 0) == 0) {
                harmonic(key.ends_with(".cos") ? m.yearly_cos : m.yearly_sin, key, 7, yearly, val);
            } else if (key.rfind("beta.", 0) == 0) {
                m.regressors.push_back(key.substr(5));
                m.weights.push_back(number(val));
            } else {
                throw parse_error("unknown model key '" + key + "'", line_no);
            }
        } catch (const std::logic_error&) {
            throw parse_error("bad value for '" + key + "'", line_no);
        }
    }
    if (!saw_format || m.target.empty() || daily < 0 || yearly < 0)
        throw parse_error("model document is incomplete");
    return m;
}

} // namespace pmaint
