#include "pmaint/report.hpp"

#include "pmaint/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pmaint {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string euros_label(double v) {
    return std::to_string(std::llround(v));
}

} // namespace

histogram_bins bin_samples(std::span<const double> samples, const histogram_options& options) {
    if (samples.empty())
        throw data_error("histogram needs at least one sample");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    histogram_bins b;
    b.lo = *mn;
    b.hi = *mx;
    for (const double ref : {options.reactive, options.maximal})
        if (!is_missing(ref)) {
            b.lo = std::min(b.lo, ref);
            b.hi = std::max(b.hi, ref);
        }
    if (!(b.hi > b.lo)) {
        b.lo -= 0.5;
        b.hi += 0.5;
    }
    const auto n = options.bins ? options.bins
                                : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples.size()))));
    b.counts.assign(std::max<std::size_t>(n, 1), 0);
    const double width = (b.hi - b.lo) / static_cast<double>(b.counts.size());
    for (const double x : samples) {
        auto i = static_cast<std::size_t>(std::floor((x - b.lo) / width));
        b.counts[std::min(i, b.counts.size() - 1)]++;
    }
    return b;
}

std::string emit_histogram(std::span<const double> samples, const histogram_options& options) {
    const auto bins = bin_samples(samples, options);
    const double left = 70, right = 20, top = 36, bottom = 48;
    const double pw = options.width - left - right;
    const double ph = options.height - top - bottom;
    const auto peak = *std::max_element(bins.counts.begin(), bins.counts.end());
    auto x_of = [&](double v) { return left + (v - bins.lo) / (bins.hi - bins.lo) * pw; };
    auto y_of = [&](double c) { return top + ph - c / static_cast<double>(std::max<std::size_t>(peak, 1)) * ph; };
    const double bw = pw / static_cast<double>(bins.counts.size());
    const double base = top + ph;

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(options.width) << "\" height=\""
      << num(options.height) << "\" viewBox=\"0 0 " << num(options.width) << ' ' << num(options.height) << "\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << num(options.width) << "\" height=\"" << num(options.height)
      << "\" fill=\"white\"/>\n";
    if (!options.title.empty())
        o << "<text x=\"" << num(options.width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"14\">" << xml_escape(options.title) << "</text>\n";

    o << "<g class=\"bars\" fill=\"#4c72b0\">\n";
    for (std::size_t i = 0; i < bins.counts.size(); ++i) {
        if (!bins.counts[i])
            continue;
        const double y = y_of(static_cast<double>(bins.counts[i]));
        o << "<rect class=\"bar\" x=\"" << num(left + bw * static_cast<double>(i)) << "\" y=\"" << num(y)
          << "\" width=\"" << num(bw) << "\" height=\"" << num(base - y) << "\"/>\n";
    }
    o << "</g>\n";

    // axes
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(base) << "\" x2=\"" << num(left + pw) << "\" y2=\""
      << num(base) << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(base)
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = bins.lo + (bins.hi - bins.lo) * i / 4.0;
        o << "<text x=\"" << num(x_of(v)) << "\" y=\"" << num(base + 32)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << euros_label(v)
          << "</text>\n";
    }
    o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << peak << "</text>\n";
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(options.height - 4)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">cost (EUR)</text>\n";

    if (!is_missing(options.reactive))
        o << "<line class=\"reactive\" x1=\"" << num(x_of(options.reactive)) << "\" y1=\"" << num(top) << "\" x2=\""
          << num(x_of(options.reactive)) << "\" y2=\"" << num(base)
          << "\" stroke=\"#c44e52\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    if (!is_missing(options.maximal))
        o << "<line class=\"maximal\" x1=\"" << num(x_of(options.maximal)) << "\" y1=\"" << num(top) << "\" x2=\""
          << num(x_of(options.maximal)) << "\" y2=\"" << num(base)
          << "\" stroke=\"#55a868\" stroke-width=\"1.5\" stroke-dasharray=\"1,3\"/>\n";

    double mean = 0.0;
    for (const double x : samples)
        mean += x;
    mean /= static_cast<double>(samples.size());
    const double mx = x_of(mean);
    o << "<polygon class=\"mean\" points=\"" << num(mx) << ',' << num(base + 2) << ' ' << num(mx - 5) << ','
      << num(base + 12) << ' ' << num(mx + 5) << ',' << num(base + 12) << "\" fill=\"black\"/>\n";
    o << "</svg>\n";
    return o.str();
}

report_row row_of(std::string policy, std::string period, const cost_distribution& dist) {
    report_row r;
    r.policy = std::move(policy);
    r.period = std::move(period);
    r.stats = dist.stats;
    const auto& best = dist.best();
    r.mean_dt = best.mean_dt;
    r.n_tp = best.n_tp;
    r.n_fp = best.n_fp;
    r.n_fn = best.n_fn;
    return r;
}

report_row constant_row(std::string policy, std::string period, money cost, std::size_t n_tp, std::size_t n_fn,
                        double mean_dt) {
    const double v = cost.euros();
    report_row r;
    r.policy = std::move(policy);
    r.period = std::move(period);
    r.stats = summarize(std::span<const double>(&v, 1));
    r.mean_dt = mean_dt;
    r.n_tp = n_tp;
    r.n_fn = n_fn;
    return r;
}

namespace {

nlohmann::ordered_json row_json(const report_row& r) {
    nlohmann::ordered_json j;
    j["policy"] = r.policy;
    j["period"] = r.period;
    j["mean"] = std::llround(r.stats.mean);
    j["std"] = std::llround(r.stats.stddev);
    j["min"] = std::llround(r.stats.min);
    j["q1"] = std::llround(r.stats.q1);
    j["median"] = std::llround(r.stats.median);
    j["q3"] = std::llround(r.stats.q3);
    j["max"] = std::llround(r.stats.max);
    j["mean_dt"] = std::round(r.mean_dt * 100.0) / 100.0;
    j["n_tp"] = r.n_tp;
    j["n_fp"] = r.n_fp;
    j["n_fn"] = r.n_fn;
    j["n_samples"] = r.stats.count;
    return j;
}

} // namespace

std::string report_json(const report_document& doc) {
    nlohmann::ordered_json j;
    j["format"] = "pmaint-report/1";
    j["period"] = doc.period;
    j["begin"] = format_timestamp(doc.begin);
    j["end"] = format_timestamp(doc.end);
    j["seed"] = doc.seed;
    j["n_samples"] = doc.n_samples;
    j["turbines"] = doc.turbines;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : doc.fleet)
        rows.push_back(row_json(r));
    j["rows"] = std::move(rows);
    auto per = nlohmann::ordered_json::array();
    for (const auto& [turbine, r] : doc.per_turbine) {
        auto e = row_json(r);
        e["turbine"] = turbine;
        per.push_back(std::move(e));
    }
    j["per_turbine"] = std::move(per);
    return j.dump(2) + "\n";
}

} // namespace pmaint
