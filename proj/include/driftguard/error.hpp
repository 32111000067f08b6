#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driftguard {

/// Base for every error raised by the library. Each subclass maps onto one
/// CLI exit code (see tools/commands.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: dimensions, hyper-parameters, simulator constants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or insufficient input data.
class InputError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. s <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced during a computation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Text input that does not parse. Carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace driftguard
