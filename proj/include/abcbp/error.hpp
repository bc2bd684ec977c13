#ifndef ABCBP_ERROR_HPP
#define ABCBP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace abcbp {

// Base for every error the library throws. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A non-finite activation, error or step was produced.
class NumericError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value or unknown name.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input file. Carries the offending line number (1-based, 0 when
// the problem is not tied to a line).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Operation called on an object in the wrong state (e.g. unset fitness).
class StateError : public Error {
public:
    using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace abcbp

#endif
