#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deint {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument, violated precondition or invariant. CLI exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A pipeline stage could not produce a result (e.g. no significant clusters).
class PipelineError : public Error {
public:
    using Error::Error;
};

}  // namespace deint
