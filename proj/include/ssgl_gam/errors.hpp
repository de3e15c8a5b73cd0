#pragma once

#include <stdexcept>
#include <string>

namespace ssgl_gam {

/// Broad failure classes. The CLI maps them onto exit codes 1/2/3.
enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

/// Invalid argument or flag value.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Input data violates a model assumption (support, shape, constant column, ...).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// A value lies outside a family's natural-parameter or mean domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Quantile knots collapsed onto each other.
class KnotError : public DataError {
public:
    using DataError::DataError;
};

/// Metric is undefined for the given input (e.g. a single class for AUC).
class MetricError : public DataError {
public:
    using DataError::DataError;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace ssgl_gam
