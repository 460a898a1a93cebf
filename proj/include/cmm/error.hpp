#pragma once

#include <stdexcept>
#include <string>

namespace cmm {

enum class ErrorCode {
    InvalidArgument,
    NoPhysicalRoot,
    InconsistentRoot,
    NonConvergence,
    EigenFailure,
    Unstable,
    SingularSystem,
    UnphysicalInput,
    MismatchedConfigs,
    ConfigError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoPhysicalRoot: return "NoPhysicalRoot";
        case ErrorCode::InconsistentRoot: return "InconsistentRoot";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::EigenFailure: return "EigenFailure";
        case ErrorCode::Unstable: return "Unstable";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::UnphysicalInput: return "UnphysicalInput";
        case ErrorCode::MismatchedConfigs: return "MismatchedConfigs";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Domain error carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

inline void require(bool condition, const std::string& what) {
    if (!condition) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace detail

}  // namespace cmm
