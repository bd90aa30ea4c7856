#pragma once

#include <stdexcept>
#include <string>

namespace klconst {

// Bad shapes, non-unit vectors, out-of-range scalar arguments.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation undefined for the given input (e.g. min over an empty pair set).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical routine failed to bracket or produced an infeasible value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or missing configuration; names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& path, int line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace klconst
