#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memsim {

enum class ErrorKind {
    StateOutOfBounds,
    OutOfValidityRange,
    Overflow,
    NoConvergence,
    SolverDiverged,
    InsufficientData,
    Config,
    Validation,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::StateOutOfBounds: return "StateOutOfBounds";
        case ErrorKind::OutOfValidityRange: return "OutOfValidityRange";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SolverDiverged: return "SolverDiverged";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Validation: return "Validation";
    }
    return "Unknown";
}

/// Configuration and validation problems are caught before a run starts.
/// Everything else surfaces during the run itself.
constexpr bool is_config_error(ErrorKind k) noexcept {
    return k == ErrorKind::Config || k == ErrorKind::Validation;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace memsim
