#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmaint {

/// Base of every error raised by the library. The C API maps each subclass
/// to a distinct status code.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t line = 0)
        : error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class alignment_error : public error { using error::error; };
class reference_error : public error { using error::error; };
class range_error : public error { using error::error; };
class data_error : public error { using error::error; };
class singular_error : public error { using error::error; };
class calibration_error : public error { using error::error; };
class empty_distribution_error : public error { using error::error; };
class config_error : public error { using error::error; };
class io_error : public error { using error::error; };

} // namespace pmaint
