#pragma once

#include <stdexcept>
#include <string>

namespace riskpath {

// Caller violated a precondition (bad size, out-of-bounds cell, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed text input. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A search result failed validation or an invariant was broken.
class CorrectnessError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace riskpath
