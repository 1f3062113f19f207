#pragma once

#include <stdexcept>
#include <string>

namespace greenmesh {

// Base for anything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (CSV rows, weight files, config syntax).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input that violates a documented precondition
// (negative capacity, empty series, shape mismatch, bad range).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A requested allocation exceeds a hard resource bound (container count,
// per-container throughput, harvest ceiling).
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& msg) : Error(msg) {}
};

// Unknown key, unparsable value, or missing required entry in a run config.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace greenmesh
