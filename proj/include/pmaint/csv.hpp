#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pmaint::csv {

/// Streaming reader for RFC 4180-style CSV: comma separated, optional double
/// quotes with `""` escapes, LF or CRLF line ends.
class reader {
public:
    explicit reader(std::istream& in) : in_(in) {}

    /// Reads the next record; returns false at end of input. Blank lines are
    /// skipped.
    bool next(std::vector<std::string>& fields);

    /// Line number on which the most recently returned record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

/// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Empty or "nan" (any case) means missing.
std::optional<double> parse_number(std::string_view text);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

/// Index of `name` in `header`, or npos.
std::size_t column_index(const std::vector<std::string>& header, std::string_view name);

} // namespace pmaint::csv
