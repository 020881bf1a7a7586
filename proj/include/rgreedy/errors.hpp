#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgreedy {

/// Invalid parameters, dimension mismatches, violated preconditions.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A series or output trace with zero variance cannot be normalized.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed data file. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace rgreedy
