#ifndef KEPCG_ERRORS_HPP
#define KEPCG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kepcg {

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a guard refuses an input (K too large, enumeration too big, ...).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kepcg

#endif
