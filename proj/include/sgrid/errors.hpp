#pragma once

#include <stdexcept>
#include <string>

namespace sgrid {

// Invalid argument to a pure numerical routine (e.g. non-positive state).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Trajectory left the positive orthant or blew up during integration.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientSamplesError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A power-law product overflowed the admissible range.
class NumericRangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SelectionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class AssemblyError : public std::runtime_error {
public:
    AssemblyError(const std::string& what, std::size_t equation)
        : std::runtime_error(what), equation_(equation) {}

    std::size_t equation() const noexcept { return equation_; }

private:
    std::size_t equation_;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sgrid
