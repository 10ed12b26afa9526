#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Every failure the library reports derives from Error; the CLI maps the
// concrete type to a stable exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violation on a physical input (negative width, NaN energy, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// g == 0 and zero detuning: eigenvectors of the coupled problem are undefined.
class DegenerateCoupling : public Error {
public:
    using Error::Error;
};

// Bracketed root search without a sign change.
class NoSignChange : public Error {
public:
    using Error::Error;
};

// No guided slab mode (core index does not exceed the cladding).
class SlabCutoff : public Error {
public:
    using Error::Error;
};

// Auto-initialization found fewer spectral maxima than requested peaks.
class FitInitError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

// Fewer data values than the fit needs.
class UnderDetermined : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cqed
