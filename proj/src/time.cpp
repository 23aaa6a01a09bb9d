#include "pmaint/time.hpp"

#include "pmaint/errors.hpp"

#include <cctype>
#include <cstdio>

namespace pmaint {

namespace {

int read_digits(std::string_view text, std::size_t& pos, std::size_t n) {
    if (pos + n > text.size())
        throw parse_error("truncated timestamp '" + std::string(text) + "'");
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw parse_error("bad digit in timestamp '" + std::string(text) + "'");
        v = v * 10 + (c - '0');
    }
    pos += n;
    return v;
}

void expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c)
        throw parse_error("expected '" + std::string(1, c) + "' in timestamp '" + std::string(text) + "'");
    ++pos;
}

} // namespace

timestamp parse_timestamp(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);

    std::size_t pos = 0;
    const int y = read_digits(text, pos, 4);
    expect(text, pos, '-');
    const int mo = read_digits(text, pos, 2);
    expect(text, pos, '-');
    const int d = read_digits(text, pos, 2);

    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        throw parse_error("invalid calendar date in '" + std::string(text) + "'");

    int hh = 0, mm = 0, ss = 0;
    std::int64_t offset = 0;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        ++pos;
        hh = read_digits(text, pos, 2);
        expect(text, pos, ':');
        mm = read_digits(text, pos, 2);
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            ss = read_digits(text, pos, 2);
            if (pos < text.size() && text[pos] == '.') {
                ++pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
            }
        }
        if (hh > 23 || mm > 59 || ss > 60)
            throw parse_error("time of day out of range in '" + std::string(text) + "'");
        if (pos < text.size()) {
            const char z = text[pos];
            if (z == 'Z') {
                ++pos;
            } else if (z == '+' || z == '-') {
                ++pos;
                const int oh = read_digits(text, pos, 2);
                if (pos < text.size() && text[pos] == ':')
                    ++pos;
                const int om = read_digits(text, pos, 2);
                offset = (z == '+' ? 1 : -1) * (oh * 3600 + om * 60);
            }
        }
    }
    if (pos != text.size())
        throw parse_error("trailing characters in timestamp '" + std::string(text) + "'");

    const std::chrono::sys_days day_point{ymd};
    return timestamp{day_point} + seconds{hh * 3600 + mm * 60 + ss - offset};
}

std::string format_timestamp(timestamp t) {
    const auto day_point = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day_point};
    const auto tod = (t - day_point).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod / 3600), static_cast<long long>(tod / 60 % 60),
                  static_cast<long long>(tod % 60));
    return buf;
}

std::string format_date(timestamp t) {
    return format_timestamp(t).substr(0, 10);
}

std::int64_t floor_days(timestamp from, timestamp to) {
    return std::chrono::floor<std::chrono::days>(to - from).count();
}

time_grid::time_grid(timestamp start_, seconds step_, std::size_t count_)
    : start(start_), step(step_), count(count_) {
    if (step <= seconds{0})
        throw range_error("time grid step must be positive");
}

std::size_t time_grid::lower_index(timestamp t) const {
    if (t <= start)
        return 0;
    const auto offset = (t - start).count();
    const auto s = step.count();
    const auto k = static_cast<std::size_t>((offset + s - 1) / s);
    return k > count ? count : k;
}

std::size_t time_grid::steps_in(seconds d) const {
    if (d.count() < 0 || d.count() % step.count() != 0)
        throw range_error("duration is not a whole number of grid steps");
    return static_cast<std::size_t>(d.count() / step.count());
}

} // namespace pmaint
