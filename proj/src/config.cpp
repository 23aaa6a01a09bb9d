#include "pmaint/config.hpp"

#include "pmaint/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace pmaint {

namespace {

using json = nlohmann::json;

std::string join(std::string_view where, std::string_view key) {
    return where.empty() ? std::string(key) : std::string(where) + "." + std::string(key);
}

const json* section(const json& parent, std::string_view where, const char* key,
                    std::initializer_list<std::string_view> allowed) {
    const auto it = parent.find(key);
    if (it == parent.end() || it->is_null())
        return nullptr;
    const auto name = join(where, key);
    if (!it->is_object())
        throw config_error("'" + name + "' must be an object");
    for (const auto& item : it->items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw config_error("unknown key '" + join(name, item.key()) + "'");
    return &*it;
}

template <class T>
bool get(const json* obj, std::string_view where, const char* key, T& dst) {
    if (!obj)
        return false;
    const auto it = obj->find(key);
    if (it == obj->end() || it->is_null())
        return false;
    const auto name = join(where, key);
    const auto bad = [&](const char* what) { return config_error("'" + name + "' must be " + what); };
    if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string())
            throw bad("a string");
        dst = it->template get<std::string>();
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean())
            throw bad("true or false");
        dst = it->template get<bool>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_unsigned())
            throw bad("a non-negative integer");
        dst = it->template get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer())
            throw bad("an integer");
        dst = it->template get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number())
            throw bad("a number");
        dst = it->template get<T>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (!it->is_array())
            throw bad("an array of strings");
        dst.clear();
        for (const auto& e : *it) {
            if (!e.is_string())
                throw bad("an array of strings");
            dst.push_back(e.template get<std::string>());
        }
    } else {
        static_assert(sizeof(T) == 0, "unsupported config field type");
    }
    return true;
}

timestamp get_time(const json* obj, std::string_view where, const char* key, timestamp fallback) {
    std::string text;
    if (!get(obj, where, key, text))
        return fallback;
    try {
        return parse_timestamp(text);
    } catch (const parse_error& e) {
        throw config_error("'" + join(where, key) + "': " + e.what());
    }
}

void require(bool ok, const std::string& what) {
    if (!ok)
        throw config_error(what);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

pipeline_config parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    require(root.is_object(), "config root must be an object");
    for (const auto& item : root.items()) {
        static const std::initializer_list<std::string_view> known{
            "paths", "columns", "target", "dead_sensors", "failure_components", "periods", "health", "nbm",
            "calibration", "diagnostics", "costs", "h_grid", "sampling"};
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw config_error("unknown key '" + item.key() + "'");
    }

    pipeline_config c;

    const auto* paths = section(root, "", "paths", {"scada", "failures", "output"});
    std::string s;
    require(get(paths, "paths", "scada", s), "'paths.scada' is required");
    c.scada = resolve(base_dir, s);
    require(get(paths, "paths", "failures", s), "'paths.failures' is required");
    c.failures = resolve(base_dir, s);
    c.output = get(paths, "paths", "output", s) ? resolve(base_dir, s) : base_dir / "out";
    require(std::filesystem::is_regular_file(c.scada), "SCADA file '" + c.scada.string() + "' does not exist");
    require(std::filesystem::is_regular_file(c.failures),
            "failures file '" + c.failures.string() + "' does not exist");

    const auto* cols = section(root, "", "columns", {"timestamp", "turbine", "sensors", "step_minutes"});
    get(cols, "columns", "timestamp", c.columns.timestamp);
    get(cols, "columns", "turbine", c.columns.turbine);
    get(cols, "columns", "sensors", c.columns.sensors);
    int step_minutes = 10;
    get(cols, "columns", "step_minutes", step_minutes);
    require(step_minutes > 0 && 1440 % step_minutes == 0, "'columns.step_minutes' must divide one day");
    c.columns.step = std::chrono::minutes(step_minutes);

    get(&root, "", "target", c.target);
    require(!c.target.empty(), "'target' must not be empty");
    get(&root, "", "dead_sensors", c.dead_sensors);
    get(&root, "", "failure_components", c.failure_components);

    const auto* per = section(root, "", "periods", {"train_begin", "test1_begin", "test2_begin", "end"});
    c.periods.train_begin = get_time(per, "periods", "train_begin", c.periods.train_begin);
    c.periods.test1_begin = get_time(per, "periods", "test1_begin", c.periods.test1_begin);
    c.periods.test2_begin = get_time(per, "periods", "test2_begin", c.periods.test2_begin);
    c.periods.end = get_time(per, "periods", "end", c.periods.end);
    require(c.periods.train_begin < c.periods.test1_begin && c.periods.test1_begin < c.periods.test2_begin &&
                c.periods.test2_begin < c.periods.end,
            "period boundaries must be strictly increasing");

    const auto* health = section(root, "", "health", {"cut_days"});
    get(health, "health", "cut_days", c.cut_days);
    require(c.cut_days > 0, "'health.cut_days' must be positive");

    const auto* nbm = section(root, "", "nbm", {"daily_order", "yearly_order", "lambda", "scan_orders"});
    get(nbm, "nbm", "daily_order", c.daily_order);
    get(nbm, "nbm", "yearly_order", c.yearly_order);
    require(c.daily_order >= 0 && c.daily_order <= 20 && c.yearly_order >= 0 && c.yearly_order <= 20,
            "NBM orders must lie in [0, 20]");
    double lambda = 0.0;
    if (get(nbm, "nbm", "lambda", lambda)) {
        require(lambda >= 0.0, "'nbm.lambda' must be non-negative");
        c.lambda = lambda;
    }
    if (nbm && nbm->contains("scan_orders") && !(*nbm)["scan_orders"].is_null()) {
        const auto& arr = (*nbm)["scan_orders"];
        require(arr.is_array() && !arr.empty(), "'nbm.scan_orders' must be a non-empty array of [daily, yearly]");
        c.scan_orders.clear();
        for (const auto& e : arr) {
            require(e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number_integer(),
                    "'nbm.scan_orders' entries must be [daily, yearly] integer pairs");
            const int d = e[0].get<int>(), y = e[1].get<int>();
            require(d >= 0 && d <= 20 && y >= 0 && y <= 20, "'nbm.scan_orders' orders must lie in [0, 20]");
            c.scan_orders.emplace_back(d, y);
        }
    }

    const auto* cal = section(root, "", "calibration", {"wait_days", "baseline_days"});
    get(cal, "calibration", "wait_days", c.cusum.wait_days);
    get(cal, "calibration", "baseline_days", c.cusum.baseline_days);
    require(c.cusum.wait_days >= 0 && c.cusum.baseline_days >= 1,
            "calibration needs wait_days >= 0 and baseline_days >= 1");

    const auto* diag = section(root, "", "diagnostics", {"window_days", "reference_days"});
    get(diag, "diagnostics", "window_days", c.window_days);
    get(diag, "diagnostics", "reference_days", c.reference_days);
    require(c.window_days >= 1 && c.reference_days >= 1, "diagnostic windows must be at least one day");

    const auto* costs = section(root, "", "costs",
                                {"tp_rate", "fp_cost", "fn_cost", "window_lower", "window_upper", "horizon", "cap"});
    double v = 0.0;
    if (get(costs, "costs", "tp_rate", v))
        c.rules.tp_rate = money::from_euros(v);
    if (get(costs, "costs", "fp_cost", v))
        c.rules.fp_cost = money::from_euros(v);
    if (get(costs, "costs", "fn_cost", v))
        c.rules.fn_cost = money::from_euros(v);
    if (get(costs, "costs", "cap", v))
        c.cap = money::from_euros(v);
    get(costs, "costs", "window_lower", c.rules.window_lower);
    get(costs, "costs", "window_upper", c.rules.window_upper);
    get(costs, "costs", "horizon", c.rules.horizon);
    try {
        c.rules.validate();
    } catch (const range_error& e) {
        throw config_error(e.what());
    }
    require(c.cap > money{}, "'costs.cap' must be positive");

    const auto* grid = section(root, "", "h_grid", {"min", "max", "step"});
    get(grid, "h_grid", "min", c.h_min);
    get(grid, "h_grid", "max", c.h_max);
    get(grid, "h_grid", "step", c.h_step);
    require(c.h_min > 0.0 && c.h_step > 0.0 && c.h_max >= c.h_min, "h_grid needs 0 < min <= max and step > 0");
    require((c.h_max - c.h_min) / c.h_step < 1e6, "h_grid has more than a million points");

    const auto* smp = section(root, "", "sampling", {"n_samples", "seed", "n_dates", "span_begin", "span_end",
                                                    "charge_repeat_inspections"});
    get(smp, "sampling", "n_samples", c.n_samples);
    get(smp, "sampling", "seed", c.seed);
    get(smp, "sampling", "n_dates", c.n_dates);
    get(smp, "sampling", "charge_repeat_inspections", c.charge_repeat_inspections);
    require(c.n_samples >= 1 && c.n_samples <= 10'000'000, "'sampling.n_samples' must lie in [1, 1e7]");
    const auto span_begin = get_time(smp, "sampling", "span_begin", c.periods.train_begin);
    const auto span_end = get_time(smp, "sampling", "span_end", c.periods.end);
    require(span_begin < span_end, "sampling span must be non-empty");
    if (span_begin != c.periods.train_begin || span_end != c.periods.end)
        c.inspection_span = time_range{span_begin, span_end};
    require(c.n_dates <= static_cast<std::size_t>(c.span().whole_days()),
            "'sampling.n_dates' exceeds the days in the sampling span");
    return c;
}

pipeline_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

} // namespace pmaint
