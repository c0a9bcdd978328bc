#pragma once

#include <stdexcept>
#include <string>

namespace ndattr {

/// Machine-readable failure classes. The numeric values double as process
/// exit codes for the command-line runner.
enum class ErrorCode : int {
    Ok = 0,
    Config = 2,
    Instability = 3,
    NonConvergence = 4,
    CheckFailure = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const char* kind() const noexcept;

private:
    ErrorCode code_;
};

/// Precondition violations and malformed configuration.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorCode::Config, what) {}
};

/// Non-finite state, or a time step that violates the stability bound.
class InstabilityError : public Error {
public:
    explicit InstabilityError(const std::string& what) : Error(ErrorCode::Instability, what) {}
};

/// Lookback doubling, limit-set clustering or tail fits that never settle.
class NonConvergenceError : public Error {
public:
    explicit NonConvergenceError(const std::string& what)
        : Error(ErrorCode::NonConvergence, what) {}
};

class CheckFailure : public Error {
public:
    explicit CheckFailure(const std::string& what) : Error(ErrorCode::CheckFailure, what) {}
};

inline const char* Error::kind() const noexcept {
    switch (code_) {
        case ErrorCode::Ok: return "ok";
        case ErrorCode::Config: return "config";
        case ErrorCode::Instability: return "numerical_instability";
        case ErrorCode::NonConvergence: return "nonconvergence";
        case ErrorCode::CheckFailure: return "check_failure";
    }
    return "unknown";
}

}  // namespace ndattr
