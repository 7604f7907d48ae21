#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccsemi {

/// Invalid input: wrong dimensions, out-of-range options, malformed values.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The computation reached a degenerate state (e.g. a mixture mean of 0 or 1).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter norm exceeded the configured bound; usually perfect separation.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double norm)
        : NumericalError(what), norm_(norm) {}

    double norm() const noexcept { return norm_; }

private:
    double norm_;
};

/// The reduced information matrix is singular or indefinite.
class InferenceError : public NumericalError {
public:
    InferenceError(const std::string& what, double smallest_eigenvalue)
        : NumericalError(what), smallest_eigenvalue_(smallest_eigenvalue) {}

    double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

private:
    double smallest_eigenvalue_;
};

/// Malformed text input. `line()` is 1-based and counts the header line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Files parse individually but disagree with each other (e.g. covariate count).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data are well formed but cannot be fitted (e.g. a class with no rows).
class DataError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

}  // namespace ccsemi
