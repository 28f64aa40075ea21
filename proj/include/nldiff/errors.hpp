#pragma once

#include <stdexcept>
#include <string>

namespace nldiff {

enum class ErrorKind {
    InvalidParams,
    NonConvergence,
    QuadratureFailure,
    GridTooCoarse,
    UnknownProfile,
    InsufficientData,
    FitUnstable,
    ConfigError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nldiff
