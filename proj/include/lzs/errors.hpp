#pragma once

#include <stdexcept>
#include <string>

namespace lzs {

/// Argument outside the domain of an operation (time outside the pulse,
/// anticrossing not reached, unsupported dimension, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid user-supplied configuration or input.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The ODE integrator could not make progress.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time_reached)
        : std::runtime_error(what), time_reached_(time_reached) {}

    double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A map/report file was readable but did not match the expected layout.
/// Row and column are 1-based; 0 means "not applicable".
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Analysis could not produce a trustworthy estimate.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lzs
