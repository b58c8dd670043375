#pragma once

#include <stdexcept>
#include <string>

namespace aracusum {

/// Argument outside the mathematical domain of an operation (rates outside
/// (0,1), more positives than tests, nonpositive Beta parameters, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vectors that should describe the same K regions disagree in length, or
/// time indices are out of sequence.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Carries the offending location when
/// one is known (1-based line / column, 0 when not applicable).
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace aracusum
