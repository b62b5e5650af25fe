#pragma once

#include <stdexcept>
#include <string>

namespace hexhand {

/// Base of all errors raised by the library outside plain precondition
/// violations (those throw std::invalid_argument / std::out_of_range).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration text. `line` is 1-based, 0 when the
/// error is not tied to a single line.
class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hexhand
