#include "pmaint/scada_ingest.hpp"

#include "pmaint/csv.hpp"
#include "pmaint/errors.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace pmaint {

namespace {

void require_unique(const std::vector<std::string>& names, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second)
            throw reference_error(std::string("duplicate ") + what + " '" + n + "'");
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

// Grid slot (multiple of step since the epoch) nearest to t.
std::int64_t snap_slot(timestamp t, seconds step, std::size_t line) {
    const std::int64_t s = step.count();
    const std::int64_t secs = t.time_since_epoch().count();
    const std::int64_t q = floor_div(secs, s);
    const std::int64_t r = secs - q * s;
    if (2 * r < s)
        return q;
    if (2 * r > s)
        return q + 1;
    throw alignment_error("timestamp " + format_timestamp(t) + " lies exactly between two grid points (line " +
                          std::to_string(line) + ")");
}

struct turbine_rows {
    std::int64_t first_slot = 0;
    std::int64_t last_slot = 0;
    timestamp last_raw{};
    bool any = false;
    std::vector<std::vector<double>> per_sensor;
};

} // namespace

sensor_panel::sensor_panel(time_grid grid, std::vector<std::string> turbines, std::vector<std::string> sensors)
    : grid_(grid), turbines_(std::move(turbines)), sensors_(std::move(sensors)) {
    require_unique(turbines_, "turbine");
    require_unique(sensors_, "sensor");
    values_.assign(turbines_.size() * sensors_.size() * grid_.count, missing);
}

std::size_t sensor_panel::turbine_index(std::string_view turbine) const {
    const auto it = std::find(turbines_.begin(), turbines_.end(), turbine);
    if (it == turbines_.end())
        throw reference_error("unknown turbine '" + std::string(turbine) + "'");
    return static_cast<std::size_t>(it - turbines_.begin());
}

std::size_t sensor_panel::sensor_index(std::string_view sensor) const {
    const auto it = std::find(sensors_.begin(), sensors_.end(), sensor);
    if (it == sensors_.end())
        throw reference_error("unknown sensor '" + std::string(sensor) + "'");
    return static_cast<std::size_t>(it - sensors_.begin());
}

bool sensor_panel::has_turbine(std::string_view turbine) const {
    return std::find(turbines_.begin(), turbines_.end(), turbine) != turbines_.end();
}

bool sensor_panel::has_sensor(std::string_view sensor) const {
    return std::find(sensors_.begin(), sensors_.end(), sensor) != sensors_.end();
}

std::span<const double> sensor_panel::series(std::size_t turbine, std::size_t sensor) const {
    return {values_.data() + offset(turbine, sensor), grid_.count};
}

std::span<double> sensor_panel::series(std::size_t turbine, std::size_t sensor) {
    return {values_.data() + offset(turbine, sensor), grid_.count};
}

bool operator==(const sensor_panel& a, const sensor_panel& b) {
    if (!(a.grid_ == b.grid_) || a.turbines_ != b.turbines_ || a.sensors_ != b.sensors_)
        return false;
    return a.values_.size() == b.values_.size() &&
           std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(double)) == 0;
}

sensor_panel parse_scada(std::istream& in, const column_map& map) {
    if (map.step <= seconds{0})
        throw range_error("column map step must be positive");
    csv::reader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header))
        throw parse_error("SCADA CSV is empty");

    const auto ts_col = csv::column_index(header, map.timestamp);
    const auto tb_col = csv::column_index(header, map.turbine);
    if (ts_col == std::string::npos)
        throw parse_error("missing timestamp column '" + map.timestamp + "'", reader.line());
    if (tb_col == std::string::npos)
        throw parse_error("missing turbine column '" + map.turbine + "'", reader.line());

    std::vector<std::string> sensors;
    std::vector<std::size_t> sensor_cols;
    if (map.sensors.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (c != ts_col && c != tb_col) {
                sensors.push_back(header[c]);
                sensor_cols.push_back(c);
            }
    } else {
        for (const auto& s : map.sensors) {
            const auto c = csv::column_index(header, s);
            if (c == std::string::npos)
                throw parse_error("missing sensor column '" + s + "'", reader.line());
            sensors.push_back(s);
            sensor_cols.push_back(c);
        }
    }
    if (sensors.empty())
        throw parse_error("no sensor columns", reader.line());
    require_unique(sensors, "sensor");

    std::vector<std::string> turbines;
    std::unordered_map<std::string, std::size_t> turbine_lookup;
    std::vector<turbine_rows> rows;

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const auto line = reader.line();
        if (fields.size() != header.size())
            throw parse_error("expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()),
                              line);
        timestamp t;
        try {
            t = parse_timestamp(fields[ts_col]);
        } catch (const parse_error& e) {
            throw parse_error(e.what(), line);
        }
        const auto& tb = fields[tb_col];
        if (tb.empty())
            throw parse_error("empty turbine id", line);
        auto [it, inserted] = turbine_lookup.try_emplace(tb, turbines.size());
        if (inserted) {
            turbines.push_back(tb);
            rows.emplace_back();
            rows.back().per_sensor.resize(sensors.size());
        }
        auto& tr = rows[it->second];
        if (tr.any && t < tr.last_raw)
            throw alignment_error("timestamps for turbine '" + tb + "' go backwards at line " + std::to_string(line));
        const auto slot = snap_slot(t, map.step, line);
        if (!tr.any) {
            tr.first_slot = slot;
            tr.any = true;
        }
        tr.last_raw = t;
        tr.last_slot = slot;
        const auto pos = static_cast<std::size_t>(slot - tr.first_slot);
        for (std::size_t s = 0; s < sensors.size(); ++s) {
            auto& col = tr.per_sensor[s];
            if (col.size() <= pos)
                col.resize(pos + 1, missing);
            try {
                col[pos] = csv::parse_number(fields[sensor_cols[s]]).value_or(missing);
            } catch (const parse_error& e) {
                throw parse_error(e.what(), line);
            }
        }
    }

    if (turbines.empty())
        return sensor_panel(time_grid(timestamp{}, map.step, 0), {}, std::move(sensors));

    std::int64_t lo = rows.front().first_slot, hi = rows.front().last_slot;
    for (const auto& tr : rows) {
        lo = std::min(lo, tr.first_slot);
        hi = std::max(hi, tr.last_slot);
    }
    const time_grid grid(timestamp{seconds{lo * map.step.count()}}, map.step, static_cast<std::size_t>(hi - lo + 1));
    sensor_panel panel(grid, turbines, sensors);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        auto& tr = rows[t];
        const auto base = static_cast<std::size_t>(tr.first_slot - lo);
        for (std::size_t s = 0; s < sensors.size(); ++s) {
            auto dst = panel.series(t, s);
            std::copy(tr.per_sensor[s].begin(), tr.per_sensor[s].end(), dst.begin() + static_cast<std::ptrdiff_t>(base));
            std::vector<double>().swap(tr.per_sensor[s]);
        }
    }
    return panel;
}

sensor_panel parse_scada_file(const std::string& path, const column_map& map) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open SCADA file '" + path + "'");
    return parse_scada(in, map);
}

void write_scada(std::ostream& out, const sensor_panel& panel, const column_map& map) {
    std::vector<std::string> row{map.timestamp, map.turbine};
    row.insert(row.end(), panel.sensors().begin(), panel.sensors().end());
    csv::write_row(out, row);
    const auto& grid = panel.grid();
    for (std::size_t t = 0; t < panel.turbines().size(); ++t) {
        for (std::size_t k = 0; k < grid.count; ++k) {
            row.assign({format_timestamp(grid.at(k)), panel.turbines()[t]});
            for (std::size_t s = 0; s < panel.sensors().size(); ++s)
                row.push_back(csv::format_number(panel.value(t, s, k)));
            csv::write_row(out, row);
        }
    }
}

sensor_panel drop_dead_sensors(const sensor_panel& panel, std::span<const std::string> names) {
    for (const auto& n : names)
        if (!panel.has_sensor(n))
            throw reference_error("cannot drop unknown sensor '" + n + "'");
    std::vector<std::string> keep;
    std::vector<std::size_t> keep_idx;
    for (std::size_t s = 0; s < panel.sensors().size(); ++s) {
        const auto& name = panel.sensors()[s];
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            keep.push_back(name);
            keep_idx.push_back(s);
        }
    }
    sensor_panel out(panel.grid(), panel.turbines(), std::move(keep));
    for (std::size_t t = 0; t < panel.turbines().size(); ++t)
        for (std::size_t j = 0; j < keep_idx.size(); ++j) {
            const auto src = panel.series(t, keep_idx[j]);
            std::copy(src.begin(), src.end(), out.series(t, j).begin());
        }
    return out;
}

std::vector<failure_event> parse_failures(std::istream& in, std::span<const std::string> known_turbines,
                                          const failure_costs& defaults) {
    csv::reader reader(in);
    std::vector<std::string> header;
    std::vector<failure_event> events;
    if (!reader.next(header))
        return events;

    auto required = [&](const char* name) {
        const auto c = csv::column_index(header, name);
        if (c == std::string::npos)
            throw parse_error(std::string("failures CSV lacks column '") + name + "'", reader.line());
        return c;
    };
    const auto c_ts = required("timestamp");
    const auto c_tb = required("turbine");
    const auto c_comp = required("component");
    const auto c_rem = required("remarks");
    const auto c_tp = csv::column_index(header, "tp_reward_rate");
    const auto c_fn = csv::column_index(header, "fn_cost");
    const auto c_fp = csv::column_index(header, "fp_cost");
    const auto c_syn = csv::column_index(header, "synthetic");

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const auto line = reader.line();
        if (fields.size() != header.size())
            throw parse_error("expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()),
                              line);
        failure_event ev;
        ev.tp_reward_rate = defaults.tp_reward_rate;
        ev.fn_cost = defaults.fn_cost;
        ev.fp_cost = defaults.fp_cost;
        try {
            ev.at = parse_timestamp(fields[c_ts]);
        } catch (const parse_error& e) {
            throw parse_error(e.what(), line);
        }
        ev.turbine = fields[c_tb];
        ev.component = fields[c_comp];
        ev.remarks = fields[c_rem];
        if (!known_turbines.empty() &&
            std::find(known_turbines.begin(), known_turbines.end(), ev.turbine) == known_turbines.end())
            throw reference_error("failure at line " + std::to_string(line) + " names unknown turbine '" +
                                  ev.turbine + "'");
        auto money_field = [&](std::size_t col, money& dst) {
            if (col == std::string::npos)
                return;
            std::optional<double> v;
            try {
                v = csv::parse_number(fields[col]);
            } catch (const parse_error& e) {
                throw parse_error(e.what(), line);
            }
            if (v) {
                if (*v < 0)
                    throw parse_error("negative cost override", line);
                dst = money::from_euros(*v);
            }
        };
        money_field(c_tp, ev.tp_reward_rate);
        money_field(c_fn, ev.fn_cost);
        money_field(c_fp, ev.fp_cost);
        if (c_syn != std::string::npos) {
            const auto& s = fields[c_syn];
            ev.synthetic = (s == "1" || s == "true" || s == "TRUE" || s == "True");
            if (ev.synthetic) {
                ev.tp_reward_rate = money{};
                ev.fn_cost = money{};
            }
        }
        events.push_back(std::move(ev));
    }
    std::stable_sort(events.begin(), events.end(), [](const failure_event& a, const failure_event& b) {
        return a.at != b.at ? a.at < b.at : a.turbine < b.turbine;
    });
    return events;
}

std::vector<failure_event> parse_failures_file(const std::string& path, std::span<const std::string> known_turbines,
                                               const failure_costs& defaults) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open failures file '" + path + "'");
    return parse_failures(in, known_turbines, defaults);
}

void write_failures(std::ostream& out, std::span<const failure_event> failures) {
    csv::write_row(out, {"timestamp", "turbine", "component", "remarks", "tp_reward_rate", "fn_cost", "fp_cost",
                         "synthetic"});
    for (const auto& f : failures)
        csv::write_row(out, {format_timestamp(f.at), f.turbine, f.component, f.remarks,
                             csv::format_number(f.tp_reward_rate.euros()), csv::format_number(f.fn_cost.euros()),
                             csv::format_number(f.fp_cost.euros()), f.synthetic ? "true" : "false"});
}

std::vector<failure_event> failures_of(std::span<const failure_event> failures, std::string_view turbine) {
    std::vector<failure_event> out;
    for (const auto& f : failures)
        if (f.turbine == turbine)
            out.push_back(f);
    return out;
}

std::vector<period_split> split_periods(const time_grid& grid, const period_boundaries& b) {
    if (!(b.train_begin < b.test1_begin && b.test1_begin < b.test2_begin && b.test2_begin < b.end))
        throw range_error("period boundaries must be strictly increasing");
    const std::vector<period_split> all{
        {"train", {b.train_begin, b.test1_begin}},
        {"test1", {b.test1_begin, b.test2_begin}},
        {"test2", {b.test2_begin, b.end}},
        {"test1+2", {b.test1_begin, b.end}},
    };
    std::vector<period_split> out;
    for (const auto& p : all)
        if (grid.start <= p.range.begin && p.range.end <= grid.end())
            out.push_back(p);
    if (out.empty() || out.front().name != "train")
        throw range_error("time grid [" + format_timestamp(grid.start) + ", " + format_timestamp(grid.end()) +
                          ") does not cover the train period");
    return out;
}

const period_split& find_period(std::span<const period_split> periods, std::string_view name) {
    for (const auto& p : periods)
        if (p.name == name)
            return p;
    throw range_error("period '" + std::string(name) + "' is not covered by the data");
}

} // namespace pmaint
