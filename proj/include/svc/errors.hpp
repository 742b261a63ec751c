#pragma once

#include <stdexcept>
#include <cstddef>
#include <string>
#include <utility>

namespace svc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularModel : public Error {
public:
    using Error::Error;
};

class DegenerateAlignment : public Error {
public:
    using Error::Error;
};

class NoActiveGenerator : public Error {
public:
    NoActiveGenerator() : Error("no active generator") {}
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class EmptySeries : public Error {
public:
    EmptySeries() : Error("empty series") {}
};

/// A scenario value that violates a module invariant. `field` is a JSON
/// pointer into the scenario document ("/events/2/gen").
class ValidationError : public Error {
public:
    ValidationError(std::string field, std::string reason)
        : Error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

/// Malformed scenario document.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Error raised inside a simulation run, annotated with model time.
class RunError : public Error {
public:
    RunError(double t, const std::string& what)
        : Error("t=" + std::to_string(t) + " s: " + what), time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace svc
