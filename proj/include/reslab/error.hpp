#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reslab {

enum class ErrorKind {
    NonHyperbolic,
    NotHyperbolic,
    Validation,
    Parse,
    DivergentRegion,
    MissingPrimitiveData,
    InsufficientData,
    ZeroMapResonance,
    ContourTooClose,
    NonIntegerResidue,
    CountMismatch,
    NoConvergence,
    AccuracyDomainExceeded,
    HorizonTooShort,
    IncompleteSource,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures of a numerical guard (as opposed to bad input).
constexpr bool is_numerical_guard(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DivergentRegion:
    case ErrorKind::ContourTooClose:
    case ErrorKind::NonIntegerResidue:
    case ErrorKind::CountMismatch:
    case ErrorKind::NoConvergence:
    case ErrorKind::AccuracyDomainExceeded:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace reslab
