#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sidecast {

// Argument outside the domain where a kernel is defined (e.g. t <= tau).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Regularization parameters violating their admissible ranges.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Two fields (or a field and a window) that do not live on compatible grids.
class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite sample produced by an evaluator or arithmetic stage.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace sidecast
